#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace panelgls {

/// Base class of every error raised by the toolkit. `kind()` is a stable
/// short name used by the command-line tool for its one-line diagnostics.
class Error : public std::runtime_error {
public:
  Error(std::string kind, const std::string& what)
      : std::runtime_error(what), kind_(std::move(kind)) {}
  const std::string& kind() const noexcept { return kind_; }

private:
  std::string kind_;
};

struct DimensionError : Error {
  explicit DimensionError(const std::string& what) : Error("DimensionError", what) {}
};

struct RankDeficient : Error {
  explicit RankDeficient(const std::string& what) : Error("RankDeficient", what) {}
  /// Unit (or period) index of the failing regression, or npos when the
  /// failure is not tied to a single unit.
  RankDeficient(const std::string& what, std::size_t unit)
      : Error("RankDeficient", what), unit_(unit) {}
  std::size_t unit() const noexcept { return unit_; }
  static constexpr std::size_t npos = static_cast<std::size_t>(-1);

private:
  std::size_t unit_ = npos;
};

struct SingularError : Error {
  explicit SingularError(const std::string& what) : Error("SingularError", what) {}
};

struct SingularWeight : Error {
  explicit SingularWeight(const std::string& what) : Error("SingularWeight", what) {}
  SingularWeight(const std::string& what, int step) : Error("SingularWeight", what), step_(step) {}
  /// GLS step (1-based) at which the weight degenerated; 0 when not iterating.
  int step() const noexcept { return step_; }

private:
  int step_ = 0;
};

struct BandwidthError : Error {
  explicit BandwidthError(const std::string& what) : Error("BandwidthError", what) {}
};

struct ParseError : Error {
  explicit ParseError(const std::string& what) : Error("ParseError", what) {}
};

struct UnbalancedPanel : Error {
  explicit UnbalancedPanel(const std::string& what) : Error("UnbalancedPanel", what) {}
};

struct CommonRegressorMismatch : Error {
  explicit CommonRegressorMismatch(const std::string& what)
      : Error("CommonRegressorMismatch", what) {}
};

struct IoError : Error {
  explicit IoError(const std::string& what) : Error("IoError", what) {}
};

struct ConfigError : Error {
  explicit ConfigError(const std::string& what) : Error("ConfigError", what) {}
};

struct McError : Error {
  explicit McError(const std::string& what) : Error("McError", what) {}
};

}  // namespace panelgls
