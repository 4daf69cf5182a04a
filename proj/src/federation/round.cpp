#include "fedeval/federation/round.hpp"

#include <algorithm>
#include <functional>
#include <map>
#include <sstream>
#include <thread>

#include "fedeval/measures.hpp"

namespace fedeval {

namespace {

std::string join_ids(const std::vector<int>& ids) {
  std::ostringstream out;
  for (std::size_t i = 0; i < ids.size(); ++i) {
    if (i > 0) out << ", ";
    out << ids[i];
  }
  return out.str();
}

}  // namespace

Coordinator::Coordinator(std::vector<RegisteredParticipant> participants, RoundOptions options)
    : participants_(std::move(participants)), options_(options) {
  if (participants_.empty()) throw ValidationError("coordinator needs at least one participant");
  std::sort(participants_.begin(), participants_.end(), [](const auto& a, const auto& b) {
    return a.registration.participant_id < b.registration.participant_id;
  });
  const Task task = participants_.front().registration.task;
  const int class_count = participants_.front().registration.class_count;
  for (std::size_t i = 0; i < participants_.size(); ++i) {
    const auto& reg = participants_[i].registration;
    if (i > 0 && reg.participant_id == participants_[i - 1].registration.participant_id) {
      throw ProtocolError("duplicate participant id " + std::to_string(reg.participant_id));
    }
    if (reg.task != task) throw ProtocolError("participants registered mixed tasks");
    if (task == Task::classification && reg.class_count != class_count) {
      throw ProtocolError("participants registered different class counts");
    }
  }
}

RoundResult Coordinator::run_round(std::span<const MetricSpec> specs) {
  const std::int64_t round_id = next_round_id_++;
  if (specs.empty()) return {};

  const Task task = participants_.front().registration.task;
  std::vector<StatisticId> needed_stats;
  for (const auto& spec : specs) {
    spec.validate();
    if (spec.task() != task) {
      throw ValidationError(spec.name() + " does not apply to the registered " +
                            to_string(task) + " federation");
    }
    for (StatisticId id : statistic_plan(spec).phases) {
      if (std::find(needed_stats.begin(), needed_stats.end(), id) == needed_stats.end()) {
        needed_stats.push_back(id);
      }
    }
  }

  auto broadcast = [&](Phase phase, MessagePayload payload,
                       const std::vector<std::size_t>& to) {
    RoundMessage msg{kSchemaVersion, round_id, phase, kCoordinatorId, std::move(payload)};
    for (std::size_t idx : to) {
      try {
        participants_[idx].channel->send(msg);
      } catch (const std::runtime_error&) {
        // Broadcasts are best effort; a vanished peer surfaces on collect.
      }
    }
  };

  std::vector<std::size_t> everyone(participants_.size());
  for (std::size_t i = 0; i < everyone.size(); ++i) everyone[i] = i;

  auto abort_round = [&](const std::string& reason) {
    broadcast(Phase::error, ErrorPayload{reason}, everyone);
  };

  // Collects one response per expected participant. Responses land in a map
  // keyed by participant id so later folds are arrival-order independent.
  auto collect = [&](Phase expected, const std::vector<std::size_t>& from,
                     std::map<int, RoundMessage>& out) -> std::vector<std::size_t> {
    std::vector<std::size_t> responded;
    std::vector<int> missing;
    for (std::size_t idx : from) {
      const int id = participants_[idx].registration.participant_id;
      RoundMessage msg;
      try {
        msg = participants_[idx].channel->receive(options_.phase_timeout);
      } catch (const TimeoutError&) {
        // Slow peers are only tolerated under allow_partial; hard failures
        // (closed connection, garbage frame) abort regardless.
        missing.push_back(id);
        continue;
      } catch (const ProtocolError& e) {
        abort_round(std::string("round aborted: ") + e.what());
        throw ProtocolError("participant " + std::to_string(id) + ": " + e.what());
      }
      if (msg.phase == Phase::error) {
        const auto& err = std::get<ErrorPayload>(msg.payload);
        abort_round("participant " + std::to_string(id) + " failed: " + err.message);
        throw ProtocolError("participant " + std::to_string(id) + " failed: " + err.message);
      }
      if (msg.phase != expected) {
        abort_round("unexpected phase " + to_string(msg.phase));
        throw ProtocolError("expected " + to_string(expected) + " from participant " +
                            std::to_string(id) + ", got " + to_string(msg.phase));
      }
      if (msg.sender_id != id) {
        abort_round("sender id mismatch");
        throw ProtocolError("channel of participant " + std::to_string(id) +
                            " delivered a message from " + std::to_string(msg.sender_id));
      }
      out.emplace(id, std::move(msg));
      responded.push_back(idx);
    }
    if (!missing.empty() && !options_.allow_partial) {
      abort_round("round aborted: missing participants " + join_ids(missing));
      throw TimeoutError("round aborted: no response from participants " + join_ids(missing));
    }
    if (responded.empty()) {
      abort_round("round aborted: no participant responded");
      throw TimeoutError("round aborted: no participant responded");
    }
    // A second frame inside one phase would double counts under summation,
    // so drain each channel and treat any straggler as a protocol violation.
    for (std::size_t idx : responded) {
      try {
        const RoundMessage stray =
            participants_[idx].channel->receive(std::chrono::milliseconds(0));
        abort_round("duplicate message in phase " + to_string(expected));
        throw ProtocolError("participant " +
                            std::to_string(participants_[idx].registration.participant_id) +
                            " sent more than one " + to_string(stray.phase) + " message");
      } catch (const TimeoutError&) {
        // Clean channel.
      }
    }
    return responded;
  };

  std::vector<std::size_t> active = everyone;
  std::vector<ResolvedStatistic> resolved;
  if (!needed_stats.empty()) {
    broadcast(Phase::stat_request, StatRequestPayload{needed_stats}, active);
    std::map<int, RoundMessage> responses;
    active = collect(Phase::stat_response, active, responses);
    for (StatisticId id : needed_stats) {
      MeanStatistic total;
      for (const auto& [pid, msg] : responses) {
        const auto& payload = std::get<StatResponsePayload>(msg.payload);
        const auto entry = std::find_if(payload.statistics.begin(), payload.statistics.end(),
                                        [&](const StatEntry& e) { return e.id == id; });
        if (entry == payload.statistics.end()) {
          abort_round("statistic missing from response");
          throw ProtocolError("participant " + std::to_string(pid) + " omitted statistic " +
                              to_string(id));
        }
        total += entry->statistic;
      }
      resolved.push_back({id, total.mean()});
    }
  }

  broadcast(Phase::am_request,
            AmRequestPayload{std::vector<MetricSpec>(specs.begin(), specs.end()), resolved},
            active);
  std::map<int, RoundMessage> responses;
  const std::vector<std::size_t> contributed = collect(Phase::am_response, active, responses);
  if (contributed.size() < active.size()) {
    // Statistic providers must also provide measures, otherwise the round's
    // global statistics would describe a different federation.
    std::vector<int> lost;
    for (std::size_t idx : active) {
      const int id = participants_[idx].registration.participant_id;
      if (responses.find(id) == responses.end()) lost.push_back(id);
    }
    abort_round("round aborted: participants dropped mid-round: " + join_ids(lost));
    throw ProtocolError("participants dropped after contributing statistics: " + join_ids(lost));
  }

  std::vector<AggregatableMeasure> measures;
  RoundResult result;
  for (const auto& [pid, msg] : responses) {
    measures.push_back(std::get<AmResponsePayload>(msg.payload).measure);
    result.participants.push_back(pid);
  }
  const AggregatableMeasure total = aggregate_ams(measures);
  for (const auto& spec : specs) result.values.push_back(metric_from_am(total, spec));

  broadcast(Phase::result_broadcast, ResultPayload{result.values, result.participants},
            contributed);
  return result;
}

void send_registration(MessageChannel& channel, const LabeledPredictions& data,
                       int participant_id) {
  channel.send({kSchemaVersion, 0, Phase::registration, participant_id,
                RegistrationPayload{participant_id, data.task(), data.class_count()}});
}

ResultPayload serve_round(MessageChannel& channel, const LabeledPredictions& data,
                          int participant_id, std::chrono::milliseconds timeout) {
  std::vector<ResolvedStatistic> cached;
  for (;;) {
    const RoundMessage request = channel.receive(timeout);
    switch (request.phase) {
      case Phase::stat_request: {
        const auto& req = std::get<StatRequestPayload>(request.payload);
        StatResponsePayload response;
        for (StatisticId id : req.statistics) {
          if (id != StatisticId::global_mean) {
            throw ProtocolError("unsupported statistic requested");
          }
          if (data.task() != Task::regression) {
            throw ProtocolError("global mean requested over classification data");
          }
          response.statistics.push_back({id, compute_mean_statistic(data)});
        }
        channel.send({kSchemaVersion, request.round_id, Phase::stat_response, participant_id,
                      std::move(response)});
        break;
      }
      case Phase::am_request: {
        const auto& req = std::get<AmRequestPayload>(request.payload);
        cached = req.statistics;
        auto make_measure = [&]() -> AggregatableMeasure {
          if (data.task() == Task::classification) {
            return compute_classification_am(data);
          }
          const auto mean = std::find_if(cached.begin(), cached.end(), [](const auto& s) {
            return s.id == StatisticId::global_mean;
          });
          if (mean == cached.end()) {
            throw ProtocolError("measure request lacks the global mean statistic");
          }
          return compute_regression_am(data, mean->value);
        };
        channel.send({kSchemaVersion, request.round_id, Phase::am_response, participant_id,
                      AmResponsePayload{make_measure()}});
        break;
      }
      case Phase::result_broadcast:
        return std::get<ResultPayload>(request.payload);
      case Phase::error:
        throw ProtocolError("coordinator aborted: " +
                            std::get<ErrorPayload>(request.payload).message);
      default:
        throw ProtocolError("participant received unexpected phase " + to_string(request.phase));
    }
  }
}

namespace {

RoundResult run_round_threaded(
    std::span<const LabeledPredictions> partitions, std::span<const MetricSpec> specs,
    const RoundOptions& options,
    const std::function<std::pair<std::shared_ptr<MessageChannel>, std::shared_ptr<MessageChannel>>()>&
        make_link) {
  validate_federation(partitions);

  std::vector<RegisteredParticipant> registered;
  std::vector<std::thread> workers;
  workers.reserve(partitions.size());
  for (int id = 0; id < static_cast<int>(partitions.size()); ++id) {
    auto [coordinator_end, participant_end] = make_link();
    registered.push_back(
        {RegistrationPayload{id, partitions[id].task(), partitions[id].class_count()},
         coordinator_end});
    workers.emplace_back(
        [participant_end, id, &partitions, timeout = options.phase_timeout * 4] {
          try {
            serve_round(*participant_end, partitions[static_cast<std::size_t>(id)], id, timeout);
          } catch (const std::runtime_error&) {
            // Participant-side failures surface through the coordinator.
          }
        });
  }

  try {
    RoundResult result;
    {
      // Scoped so the coordinator's channel ends close before the joins;
      // workers waiting on a request (e.g. a zero-spec round) then unblock.
      Coordinator coordinator(std::move(registered), options);
      result = coordinator.run_round(specs);
    }
    for (auto& w : workers) w.join();
    return result;
  } catch (...) {
    for (auto& w : workers) {
      if (w.joinable()) w.join();
    }
    throw;
  }
}

}  // namespace

RoundResult run_round_in_process(std::span<const LabeledPredictions> partitions,
                                 std::span<const MetricSpec> specs, RoundOptions options) {
  return run_round_threaded(partitions, specs, options, [] { return make_channel_pair(); });
}

RoundResult run_round_over_sockets(std::span<const LabeledPredictions> partitions,
                                   std::span<const MetricSpec> specs, RoundOptions options) {
  TcpListener listener(TcpAddress{"127.0.0.1", 0});
  const TcpAddress address{"127.0.0.1", listener.port()};
  return run_round_threaded(partitions, specs, options, [&] {
    // Connect first so the pending accept below cannot block.
    auto participant_end = connect_tcp(address, std::chrono::milliseconds(2000));
    auto coordinator_end = listener.accept(std::chrono::milliseconds(2000));
    return std::make_pair(coordinator_end, participant_end);
  });
}

}  // namespace fedeval
