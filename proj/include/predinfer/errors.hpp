#pragma once

#include <stdexcept>
#include <string>
#include <utility>

namespace predinfer {

// Base for recoverable numerical/contract failures. The experiment runner maps
// these onto per-record failure tags instead of aborting a grid.
class Error : public std::runtime_error {
 public:
  Error(std::string tag, const std::string& what)
      : std::runtime_error(what), tag_(std::move(tag)) {}
  const std::string& tag() const noexcept { return tag_; }

 private:
  std::string tag_;
};

struct RankDeficient : Error {
  explicit RankDeficient(const std::string& w) : Error("rank_deficient", w) {}
};

struct DimensionMismatch : Error {
  explicit DimensionMismatch(const std::string& w) : Error("dimension_mismatch", w) {}
};

struct DegenerateInput : Error {
  explicit DegenerateInput(const std::string& w) : Error("degenerate_input", w) {}
};

struct TooFewPoints : Error {
  explicit TooFewPoints(const std::string& w) : Error("too_few_points", w) {}
};

struct UndefinedSE : Error {
  explicit UndefinedSE(const std::string& w) : Error("undefined_se", w) {}
};

struct ZeroSE : Error {
  explicit ZeroSE(const std::string& w) : Error("zero_se", w) {}
};

struct IoError : Error {
  explicit IoError(const std::string& w) : Error("io_error", w) {}
};

}  // namespace predinfer
