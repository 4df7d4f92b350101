#pragma once

#include <cstddef>
#include <cstdint>
#include <stdexcept>
#include <string>

namespace bsx {

enum class errc {
  invalid_params,
  not_a_phenotype,
  param_too_small,
  precondition_failed,
  syntax_error,
  invalid_graph,
  label_mismatch,
  degree_overflow,
  phenotype_mismatch,
  not_connected,
  no_free_slot,
  infinite_label,
  invalid_preaction,
  embedding_mismatch,
  undefined,
  truncation_too_small,
  not_coprime,
  invalid_input,
};

inline const char* errc_name(errc c) {
  switch (c) {
    case errc::invalid_params: return "InvalidParams";
    case errc::not_a_phenotype: return "NotAPhenotype";
    case errc::param_too_small: return "ParamTooSmall";
    case errc::precondition_failed: return "PreconditionFailed";
    case errc::syntax_error: return "SyntaxError";
    case errc::invalid_graph: return "InvalidGraph";
    case errc::label_mismatch: return "LabelMismatch";
    case errc::degree_overflow: return "DegreeOverflow";
    case errc::phenotype_mismatch: return "PhenotypeMismatch";
    case errc::not_connected: return "NotConnected";
    case errc::no_free_slot: return "NoFreeSlot";
    case errc::infinite_label: return "InfiniteLabel";
    case errc::invalid_preaction: return "InvalidPreAction";
    case errc::embedding_mismatch: return "EmbeddingMismatch";
    case errc::undefined: return "Undefined";
    case errc::truncation_too_small: return "TruncationTooSmall";
    case errc::not_coprime: return "NotCoprime";
    case errc::invalid_input: return "InvalidInput";
  }
  return "Unknown";
}

class error : public std::runtime_error {
 public:
  error(errc code, const std::string& what)
      : std::runtime_error(what), code_(code) {}
  errc code() const noexcept { return code_; }
  const char* name() const noexcept { return errc_name(code_); }

 private:
  errc code_;
};

// Raised by commute_power; carries the first prime whose valuation is too small.
class precondition_failed : public error {
 public:
  explicit precondition_failed(std::uint64_t prime)
      : error(errc::precondition_failed,
              "valuation precondition fails at prime " + std::to_string(prime)),
        prime_(prime) {}
  std::uint64_t prime() const noexcept { return prime_; }

 private:
  std::uint64_t prime_;
};

class syntax_error : public error {
 public:
  syntax_error(std::size_t position, const std::string& what)
      : error(errc::syntax_error,
              what + " at position " + std::to_string(position)),
        position_(position) {}
  std::size_t position() const noexcept { return position_; }

 private:
  std::size_t position_;
};

}  // namespace bsx
