#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace fm {

enum class ErrorCode {
  kInvalid,       // schema fails validation
  kJson,          // malformed interchange document
  kVersion,       // unknown schema_version
  kRegion,        // bad event region
  kTime,          // time machine invariant broken
  kCycle,         // chronology cycle
  kSubRegion,     // sub-event escapes its parent
  kGraph,         // event graph does not match schema
  kNoEvent,       // event id absent from trace
  kUnknownVerb,
  kBinding,
  kNoTemplate,    // verb has lexicon metadata but no FM template
  kLexicon,       // malformed lexicon or template data
  kParse,
  kIo,
};

std::string_view to_string(ErrorCode code);

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message)
      : std::runtime_error(std::string(to_string(code)) + ": " + message), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace fm
