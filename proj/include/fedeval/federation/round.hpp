#ifndef FEDEVAL_FEDERATION_ROUND_HPP
#define FEDEVAL_FEDERATION_ROUND_HPP

#include <chrono>
#include <memory>
#include <span>
#include <vector>

#include "fedeval/data.hpp"
#include "fedeval/federation/transport.hpp"
#include "fedeval/metrics.hpp"

namespace fedeval {

struct RoundOptions {
  std::chrono::milliseconds phase_timeout{5000};
  /// When set, participants that never respond are dropped from the round
  /// instead of aborting it; the effective federation is recorded in the
  /// result. A participant that answered one phase but misses a later one
  /// still aborts, since its earlier contribution cannot be unwound.
  bool allow_partial = false;
};

struct RegisteredParticipant {
  RegistrationPayload registration;
  std::shared_ptr<MessageChannel> channel;
};

struct RoundResult {
  std::vector<MetricValue> values;
  std::vector<int> participants;  // ids that contributed, ascending

  bool operator==(const RoundResult&) const = default;
};

/// Coordinator side of the round protocol. Holds no data; advances phases
/// only once every expected participant reported (or the timeout fired) and
/// folds responses in ascending participant order, so results do not depend
/// on arrival order.
class Coordinator {
 public:
  Coordinator(std::vector<RegisteredParticipant> participants, RoundOptions options = {});

  /// Runs the two-phase protocol: a statistics phase when any spec needs one,
  /// then the measure phase. Returns one value per spec (mode flam) and
  /// broadcasts the results. With no specs, no phases execute.
  RoundResult run_round(std::span<const MetricSpec> specs);

 private:
  std::vector<RegisteredParticipant> participants_;
  RoundOptions options_;
  std::int64_t next_round_id_ = 0;
};

/// Participant side: serves one round over the channel using only local data
/// plus the statistics broadcast by the coordinator. Returns the coordinator's
/// result broadcast. `channel` must already be registered.
ResultPayload serve_round(MessageChannel& channel, const LabeledPredictions& data,
                          int participant_id,
                          std::chrono::milliseconds timeout = std::chrono::milliseconds(30000));

/// Registers over a fresh channel (first message on a connection).
void send_registration(MessageChannel& channel, const LabeledPredictions& data,
                       int participant_id);

/// Runs a full round over in-process channels: participants on background
/// threads, coordinator in the calling thread.
RoundResult run_round_in_process(std::span<const LabeledPredictions> partitions,
                                 std::span<const MetricSpec> specs, RoundOptions options = {});

/// Same round over loopback TCP sockets and the framed wire format.
RoundResult run_round_over_sockets(std::span<const LabeledPredictions> partitions,
                                   std::span<const MetricSpec> specs, RoundOptions options = {});

}  // namespace fedeval

#endif  // FEDEVAL_FEDERATION_ROUND_HPP
