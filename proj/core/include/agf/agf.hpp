#pragma once

#include "agf/alert.hpp"
#include "agf/attack_graph.hpp"
#include "agf/automaton.hpp"
#include "agf/baselines.hpp"
#include "agf/digest.hpp"
#include "agf/episodes.hpp"
#include "agf/error.hpp"
#include "agf/eval.hpp"
#include "agf/forecast.hpp"
#include "agf/pipeline.hpp"
#include "agf/severity.hpp"
#include "agf/streaming.hpp"
#include "agf/synth.hpp"
#include "agf/timeutil.hpp"
#include "agf/traces.hpp"

namespace agf {
inline constexpr const char* kVersion = "0.3.0";
}
