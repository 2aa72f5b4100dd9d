#pragma once

#include <stdexcept>
#include <string>
#include <utility>

namespace vgan {

enum class Errc {
  usage,              // bad invocation / bad option value
  parse,              // malformed input document
  validation,         // well-formed but inconsistent data
  insufficient_data,  // too short / too few samples
  unvoiced,           // no voiced frames found in a segment
  missing_vowel,      // formant set lacks a required corner vowel
  degenerate,         // zero denominator / degenerate geometry
  numeric,            // NaN/Inf or a failed numerical routine
  io,                 // filesystem failure
};

// Process exit codes: 1 usage, 2 data/validation, 3 numeric failure.
inline int exit_code(Errc c) {
  switch (c) {
    case Errc::usage:
      return 1;
    case Errc::numeric:
      return 3;
    default:
      return 2;
  }
}

const char* errc_name(Errc c);

class VganError : public std::runtime_error {
 public:
  VganError(Errc code, std::string msg)
      : std::runtime_error(std::move(msg)), code_(code) {}
  Errc code() const { return code_; }

 private:
  Errc code_;
};

[[noreturn]] inline void fail(Errc code, const std::string& msg) {
  throw VganError(code, msg);
}

}  // namespace vgan
