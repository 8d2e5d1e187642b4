#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <string_view>
#include <vector>

#include "agf/alert.hpp"

namespace agf {

struct SynthStage {
  std::string name;
  Severity severity = Severity::low;
};

/// A campaign template: the stage order an attacker follows on one victim.
struct Playbook {
  std::string name;
  std::vector<std::string> stages;
  double weight = 1.0;
};

/// Parameters of the synthetic alert generator.
struct SynthSpec {
  int attackers = 16;
  int victims = 200;
  TimePoint start = TimePoint{std::chrono::seconds{1541235600}};  // 2018-11-03T09:00:00Z
  Seconds duration{10 * 3600};
  /// Probability that an (attacker, victim) pair runs a campaign.
  double participation = 1.0;
  std::vector<SynthStage> stages;
  std::vector<Playbook> playbooks;
  std::vector<std::uint16_t> ports{80, 22, 445};
  /// Per-step probability of hitting a different service than the campaign's own.
  double service_drift = 0.1;
  /// Up to this many random low-severity actions precede a campaign.
  int lead_in_max = 1;
  /// Per-step probability of a stray low-severity action before the step.
  double interleave = 0.1;
  /// Probability that monitoring picks a campaign up only after its first steps.
  double late_start = 0.0;
  /// Probability that a campaign is cut short at a uniformly chosen step.
  double truncation = 0.55;
  /// Probability that a step repeats the previous stage once more.
  double repeat = 0.1;
  int min_burst = 2;
  int max_burst = 6;
  /// Gap between consecutive actions of one campaign; at least two buckets.
  Seconds step_gap{180};
};

/// Stages and playbooks modelled on a penetration-testing competition: most
/// campaigns stop in reconnaissance, few reach a high-severity objective.
SynthSpec default_synth_spec();

/// JSON object overriding any subset of SynthSpec fields.
SynthSpec parse_synth_spec(std::string_view json_text);

/// Seeded, deterministic corpus of normalized IDS alerts, sorted by time.
std::vector<Alert> synth_corpus(const SynthSpec& spec, std::uint64_t seed);

/// Stage map matching the generator's signatures (`AGF <stage> ...`).
StageMap synth_stage_map(const SynthSpec& spec);

/// Raw IDS CSV (`timestamp,signature,src_ip,src_port,dst_ip,dst_port`).
void write_ids_csv(std::ostream& out, const std::vector<Alert>& alerts);

}  // namespace agf
