#pragma once

#include <stdexcept>
#include <string>
#include <vector>

namespace perstab {

// Process exit codes, one per error type. Kept in sync with `perstab --help`.
enum class ErrorCode : int {
  Usage = 1,
  Parse = 2,
  InvalidSpec = 3,
  DimensionMismatch = 4,
  SingularGenerator = 5,
  ResonantFrequency = 6,
  LatticeResonance = 7,
  UnstableGrowth = 8,
  StepTooLarge = 9,
  TooFewPoints = 10,
  NoImaginaryEigenvalue = 11,
  Io = 12,
};

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& msg) : std::runtime_error(msg), code_(code) {}
  ErrorCode code() const noexcept { return code_; }
  int exit_code() const noexcept { return static_cast<int>(code_); }

 private:
  ErrorCode code_;
};

class ParseError : public Error {
 public:
  explicit ParseError(const std::string& msg) : Error(ErrorCode::Parse, msg) {}
};

class InvalidSpec : public Error {
 public:
  explicit InvalidSpec(const std::string& msg) : Error(ErrorCode::InvalidSpec, msg) {}
};

class DimensionMismatch : public Error {
 public:
  explicit DimensionMismatch(const std::string& msg) : Error(ErrorCode::DimensionMismatch, msg) {}
};

// 0 is numerically in the spectrum, so A^{-1} and the decay probe are unavailable.
class SingularGenerator : public Error {
 public:
  explicit SingularGenerator(const std::string& msg) : Error(ErrorCode::SingularGenerator, msg) {}
};

// is lies numerically in the spectrum of A.
class ResonantFrequency : public Error {
 public:
  ResonantFrequency(double s, double sigma_min)
      : Error(ErrorCode::ResonantFrequency,
              "resonant frequency s=" + std::to_string(s) +
                  " (sigma_min=" + std::to_string(sigma_min) + ")"),
        frequency(s),
        sigma_min(sigma_min) {}
  double frequency;
  double sigma_min;
};

// One or more lattice points i n omega lie numerically in the spectrum of A.
class LatticeResonance : public Error {
 public:
  explicit LatticeResonance(std::vector<int> modes)
      : Error(ErrorCode::LatticeResonance, describe(modes)), modes(std::move(modes)) {}
  std::vector<int> modes;

 private:
  static std::string describe(const std::vector<int>& modes) {
    std::string s = "LatticeResonance: modes {";
    for (std::size_t i = 0; i < modes.size(); ++i) {
      if (i) s += ",";
      s += std::to_string(modes[i]);
    }
    return s + "} hit the spectrum of A";
  }
};

class UnstableGrowth : public Error {
 public:
  explicit UnstableGrowth(const std::string& msg) : Error(ErrorCode::UnstableGrowth, msg) {}
};

class StepTooLarge : public Error {
 public:
  explicit StepTooLarge(const std::string& msg) : Error(ErrorCode::StepTooLarge, msg) {}
};

class TooFewPoints : public Error {
 public:
  explicit TooFewPoints(const std::string& msg) : Error(ErrorCode::TooFewPoints, msg) {}
};

class NoImaginaryEigenvalue : public Error {
 public:
  explicit NoImaginaryEigenvalue(const std::string& msg)
      : Error(ErrorCode::NoImaginaryEigenvalue, msg) {}
};

class IoError : public Error {
 public:
  explicit IoError(const std::string& msg) : Error(ErrorCode::Io, msg) {}
};

}  // namespace perstab
