#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>

namespace fso {

using ActorId = std::string;
using SocId = std::string;
using RequestId = std::string;
using Tick = std::int64_t;
using Seq = std::uint64_t;

/// Category of a rejected spec, input, or operation.
enum class Errc {
  parse,
  cycle,
  level_rule,
  missing_engine,
  duplicate_actor,
  duplicate_membership,
  multiple_roots,
  unknown_id,
  not_member,
  duplicate_request,
  precondition,
  mismatch,
};

const char* errc_name(Errc c);

class FsoError : public std::runtime_error {
public:
  FsoError(Errc code, std::string subject, const std::string& what)
      : std::runtime_error(what), code_(code), subject_(std::move(subject)) {}

  Errc code() const { return code_; }

  /// Offending id (SoC, actor, request, ...) when one exists.
  const std::string& subject() const { return subject_; }

private:
  Errc code_;
  std::string subject_;
};

[[noreturn]] inline void fail(Errc code, const std::string& subject,
                              const std::string& what) {
  throw FsoError(code, subject, what);
}

}  // namespace fso
