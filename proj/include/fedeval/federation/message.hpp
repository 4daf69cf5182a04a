#ifndef FEDEVAL_FEDERATION_MESSAGE_HPP
#define FEDEVAL_FEDERATION_MESSAGE_HPP

#include <cstdint>
#include <string>
#include <variant>
#include <vector>

#include "fedeval/measures.hpp"
#include "fedeval/metrics.hpp"

namespace fedeval {

inline constexpr int kSchemaVersion = 1;
/// Upper bound on a frame body; measures are O(C^2) and stay far below this.
inline constexpr std::uint32_t kMaxFrameBytes = 16u * 1024 * 1024;
/// Sender id used by the coordinator.
inline constexpr int kCoordinatorId = -1;

enum class Phase {
  registration,
  stat_request,
  stat_response,
  am_request,
  am_response,
  result_broadcast,
  error,
};

std::string to_string(Phase phase);
Phase phase_from_string(const std::string& name);

/// First message on a connection: who is joining and what data shape it holds.
struct RegistrationPayload {
  int participant_id = 0;
  Task task = Task::classification;
  int class_count = 0;  // 0 for regression

  bool operator==(const RegistrationPayload&) const = default;
};

struct StatRequestPayload {
  std::vector<StatisticId> statistics;
  bool operator==(const StatRequestPayload&) const = default;
};

struct StatEntry {
  StatisticId id = StatisticId::global_mean;
  MeanStatistic statistic;
  bool operator==(const StatEntry&) const = default;
};

struct StatResponsePayload {
  std::vector<StatEntry> statistics;
  bool operator==(const StatResponsePayload&) const = default;
};

struct ResolvedStatistic {
  StatisticId id = StatisticId::global_mean;
  double value = 0.0;
  bool operator==(const ResolvedStatistic&) const = default;
};

struct AmRequestPayload {
  std::vector<MetricSpec> specs;
  std::vector<ResolvedStatistic> statistics;
  bool operator==(const AmRequestPayload&) const = default;
};

struct AmResponsePayload {
  AggregatableMeasure measure;
  bool operator==(const AmResponsePayload&) const = default;
};

struct ResultPayload {
  std::vector<MetricValue> results;
  std::vector<int> participants;  // effective federation
  bool operator==(const ResultPayload&) const = default;
};

struct ErrorPayload {
  std::string message;
  bool operator==(const ErrorPayload&) const = default;
};

using MessagePayload =
    std::variant<RegistrationPayload, StatRequestPayload, StatResponsePayload, AmRequestPayload,
                 AmResponsePayload, ResultPayload, ErrorPayload>;

/// Schema-versioned envelope of the two-phase round protocol. The payload
/// variant must match the phase; decode rejects anything else.
struct RoundMessage {
  int version = kSchemaVersion;
  std::int64_t round_id = 0;
  Phase phase = Phase::error;
  int sender_id = kCoordinatorId;
  MessagePayload payload = ErrorPayload{};

  bool operator==(const RoundMessage&) const = default;
};

Phase phase_of_payload(const MessagePayload& payload);

/// Wire frame: 4-byte big-endian body length followed by a UTF-8 JSON body.
/// Integer counts survive exactly; floats use round-trip-exact decimals.
std::string encode_message(const RoundMessage& message);

/// Decodes one complete frame. Throws ProtocolError on truncation, oversize
/// length, malformed JSON, unknown phase, payload/phase mismatch, or a
/// schema version other than kSchemaVersion.
RoundMessage decode_message(std::string_view frame);

/// Body-level codec used by transports that frame separately.
std::string encode_body(const RoundMessage& message);
RoundMessage decode_body(std::string_view body);

}  // namespace fedeval

#endif  // FEDEVAL_FEDERATION_MESSAGE_HPP
