#include "fedeval/federation/message.hpp"

#include <nlohmann/json.hpp>

namespace fedeval {

using nlohmann::json;

std::string to_string(Phase phase) {
  switch (phase) {
    case Phase::registration: return "registration";
    case Phase::stat_request: return "stat_request";
    case Phase::stat_response: return "stat_response";
    case Phase::am_request: return "am_request";
    case Phase::am_response: return "am_response";
    case Phase::result_broadcast: return "result_broadcast";
    case Phase::error: return "error";
  }
  return "?";
}

Phase phase_from_string(const std::string& name) {
  if (name == "registration") return Phase::registration;
  if (name == "stat_request") return Phase::stat_request;
  if (name == "stat_response") return Phase::stat_response;
  if (name == "am_request") return Phase::am_request;
  if (name == "am_response") return Phase::am_response;
  if (name == "result_broadcast") return Phase::result_broadcast;
  if (name == "error") return Phase::error;
  throw ProtocolError("unknown phase: " + name);
}

Phase phase_of_payload(const MessagePayload& payload) {
  switch (payload.index()) {
    case 0: return Phase::registration;
    case 1: return Phase::stat_request;
    case 2: return Phase::stat_response;
    case 3: return Phase::am_request;
    case 4: return Phase::am_response;
    case 5: return Phase::result_broadcast;
    default: return Phase::error;
  }
}

namespace {

json spec_to_json(const MetricSpec& spec) {
  const char* averaging = spec.averaging == Averaging::none
                              ? "none"
                              : (spec.averaging == Averaging::macro ? "macro" : "weighted");
  std::string kind = spec.name();
  if (auto pos = kind.find('-'); pos != std::string::npos) kind.resize(pos);
  return {{"kind", kind}, {"averaging", averaging}, {"zero_division", spec.zero_division_value}};
}

MetricSpec spec_from_json(const json& j) {
  MetricSpec spec;
  const std::string kind = j.at("kind").get<std::string>();
  const std::string averaging = j.at("averaging").get<std::string>();
  std::string token = kind;
  if (averaging == "macro") token += "-macro";
  else if (averaging == "weighted") token += "-weighted";
  else if (averaging != "none") throw ProtocolError("unknown averaging: " + averaging);
  spec = parse_metric_spec(token);
  spec.zero_division_value = j.at("zero_division").get<double>();
  return spec;
}

json measure_to_json(const AggregatableMeasure& am) {
  if (const auto* cls = std::get_if<ClassificationAm>(&am)) {
    const int c = cls->confusion.class_count();
    json counts = json::array();
    for (int t = 0; t < c; ++t) {
      json row = json::array();
      for (int p = 0; p < c; ++p) row.push_back(cls->confusion.at(t, p));
      counts.push_back(std::move(row));
    }
    return {{"type", "classification"}, {"class_count", c}, {"counts", std::move(counts)}};
  }
  const auto& reg = std::get<RegressionAm>(am);
  return {{"type", "regression"},
          {"residual_sq_sum", reg.residual_sq_sum},
          {"deviation_sq_sum", reg.deviation_sq_sum},
          {"count", reg.count}};
}

AggregatableMeasure measure_from_json(const json& j) {
  const std::string type = j.at("type").get<std::string>();
  if (type == "classification") {
    const int c = j.at("class_count").get<int>();
    ConfusionMatrix cm(c);
    const json& counts = j.at("counts");
    if (static_cast<int>(counts.size()) != c) throw ProtocolError("counts rows != class_count");
    for (int t = 0; t < c; ++t) {
      const json& row = counts[static_cast<std::size_t>(t)];
      if (static_cast<int>(row.size()) != c) throw ProtocolError("counts cols != class_count");
      for (int p = 0; p < c; ++p) {
        const std::int64_t v = row[static_cast<std::size_t>(p)].get<std::int64_t>();
        if (v < 0) throw ProtocolError("negative confusion count");
        cm.add(t, p, v);
      }
    }
    return ClassificationAm{std::move(cm)};
  }
  if (type == "regression") {
    return RegressionAm{j.at("residual_sq_sum").get<double>(),
                        j.at("deviation_sq_sum").get<double>(),
                        j.at("count").get<std::int64_t>()};
  }
  throw ProtocolError("unknown measure type: " + type);
}

json value_to_json(const MetricValue& v) {
  return {{"spec", spec_to_json(v.spec)},
          {"mode", to_string(v.mode)},
          {"value", v.value},
          {"sample_count", v.sample_count}};
}

MetricValue value_from_json(const json& j) {
  return {spec_from_json(j.at("spec")), eval_mode_from_string(j.at("mode").get<std::string>()),
          j.at("value").get<double>(), j.at("sample_count").get<std::int64_t>()};
}

json payload_to_json(const MessagePayload& payload) {
  return std::visit(
      [](const auto& p) -> json {
        using T = std::decay_t<decltype(p)>;
        if constexpr (std::is_same_v<T, RegistrationPayload>) {
          return {{"participant_id", p.participant_id},
                  {"task", to_string(p.task)},
                  {"class_count", p.class_count}};
        } else if constexpr (std::is_same_v<T, StatRequestPayload>) {
          json ids = json::array();
          for (auto id : p.statistics) ids.push_back(to_string(id));
          return {{"statistics", std::move(ids)}};
        } else if constexpr (std::is_same_v<T, StatResponsePayload>) {
          json entries = json::array();
          for (const auto& e : p.statistics) {
            entries.push_back({{"id", to_string(e.id)},
                               {"sum", e.statistic.sum},
                               {"count", e.statistic.count}});
          }
          return {{"statistics", std::move(entries)}};
        } else if constexpr (std::is_same_v<T, AmRequestPayload>) {
          json specs = json::array();
          for (const auto& s : p.specs) specs.push_back(spec_to_json(s));
          json stats = json::array();
          for (const auto& s : p.statistics) {
            stats.push_back({{"id", to_string(s.id)}, {"value", s.value}});
          }
          return {{"specs", std::move(specs)}, {"statistics", std::move(stats)}};
        } else if constexpr (std::is_same_v<T, AmResponsePayload>) {
          return {{"am", measure_to_json(p.measure)}};
        } else if constexpr (std::is_same_v<T, ResultPayload>) {
          json results = json::array();
          for (const auto& v : p.results) results.push_back(value_to_json(v));
          return {{"results", std::move(results)}, {"participants", p.participants}};
        } else {
          return {{"message", p.message}};
        }
      },
      payload);
}

MessagePayload payload_from_json(Phase phase, const json& j) {
  switch (phase) {
    case Phase::registration:
      return RegistrationPayload{j.at("participant_id").get<int>(),
                                 task_from_string(j.at("task").get<std::string>()),
                                 j.at("class_count").get<int>()};
    case Phase::stat_request: {
      StatRequestPayload p;
      for (const auto& id : j.at("statistics")) {
        p.statistics.push_back(statistic_id_from_string(id.get<std::string>()));
      }
      return p;
    }
    case Phase::stat_response: {
      StatResponsePayload p;
      for (const auto& e : j.at("statistics")) {
        p.statistics.push_back({statistic_id_from_string(e.at("id").get<std::string>()),
                                {e.at("sum").get<double>(), e.at("count").get<std::int64_t>()}});
      }
      return p;
    }
    case Phase::am_request: {
      AmRequestPayload p;
      for (const auto& s : j.at("specs")) p.specs.push_back(spec_from_json(s));
      for (const auto& s : j.at("statistics")) {
        p.statistics.push_back({statistic_id_from_string(s.at("id").get<std::string>()),
                                s.at("value").get<double>()});
      }
      return p;
    }
    case Phase::am_response:
      return AmResponsePayload{measure_from_json(j.at("am"))};
    case Phase::result_broadcast: {
      ResultPayload p;
      for (const auto& v : j.at("results")) p.results.push_back(value_from_json(v));
      p.participants = j.at("participants").get<std::vector<int>>();
      return p;
    }
    case Phase::error:
      return ErrorPayload{j.at("message").get<std::string>()};
  }
  throw ProtocolError("unhandled phase");
}

}  // namespace

std::string encode_body(const RoundMessage& message) {
  if (phase_of_payload(message.payload) != message.phase) {
    throw ProtocolError("payload variant does not match phase " + to_string(message.phase));
  }
  json j{{"version", message.version},
         {"round_id", message.round_id},
         {"phase", to_string(message.phase)},
         {"sender_id", message.sender_id},
         {"payload", payload_to_json(message.payload)}};
  return j.dump();
}

RoundMessage decode_body(std::string_view body) {
  json j;
  try {
    j = json::parse(body);
  } catch (const json::exception& e) {
    throw ProtocolError(std::string("malformed message body: ") + e.what());
  }
  try {
    RoundMessage msg;
    msg.version = j.at("version").get<int>();
    if (msg.version != kSchemaVersion) {
      throw ProtocolError("schema version mismatch: got " + std::to_string(msg.version) +
                          ", expected " + std::to_string(kSchemaVersion));
    }
    msg.round_id = j.at("round_id").get<std::int64_t>();
    msg.phase = phase_from_string(j.at("phase").get<std::string>());
    msg.sender_id = j.at("sender_id").get<int>();
    msg.payload = payload_from_json(msg.phase, j.at("payload"));
    return msg;
  } catch (const json::exception& e) {
    throw ProtocolError(std::string("invalid message: ") + e.what());
  }
}

std::string encode_message(const RoundMessage& message) {
  const std::string body = encode_body(message);
  if (body.size() > kMaxFrameBytes) {
    throw ProtocolError("frame exceeds " + std::to_string(kMaxFrameBytes) + " bytes");
  }
  const auto len = static_cast<std::uint32_t>(body.size());
  std::string frame;
  frame.reserve(4 + body.size());
  frame.push_back(static_cast<char>((len >> 24) & 0xff));
  frame.push_back(static_cast<char>((len >> 16) & 0xff));
  frame.push_back(static_cast<char>((len >> 8) & 0xff));
  frame.push_back(static_cast<char>(len & 0xff));
  frame += body;
  return frame;
}

RoundMessage decode_message(std::string_view frame) {
  if (frame.size() < 4) throw ProtocolError("truncated frame: missing length prefix");
  const auto b = [&](int i) { return static_cast<std::uint32_t>(static_cast<unsigned char>(frame[i])); };
  const std::uint32_t len = (b(0) << 24) | (b(1) << 16) | (b(2) << 8) | b(3);
  if (len > kMaxFrameBytes) {
    throw ProtocolError("frame length " + std::to_string(len) + " exceeds cap");
  }
  if (frame.size() - 4 < len) {
    throw ProtocolError("truncated frame: expected " + std::to_string(len) + " body bytes, have " +
                        std::to_string(frame.size() - 4));
  }
  if (frame.size() - 4 > len) {
    throw ProtocolError("frame has trailing bytes");
  }
  return decode_body(frame.substr(4, len));
}

}  // namespace fedeval
