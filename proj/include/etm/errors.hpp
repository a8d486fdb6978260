#pragma once

#include <stdexcept>
#include <string>

namespace etm {

// Base class for everything this library throws.
class Error : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

// Invalid specs, parameters out of range, missing finite bounds.
class ConfigError : public Error {
public:
  using Error::Error;
};

// Malformed or non-conforming encoded input (distinct from run errors).
class DecodeError : public Error {
public:
  using Error::Error;
};

// Genome/objective representation mismatch at evaluation time.
class EvaluationError : public Error {
public:
  using Error::Error;
};

// Internal bookkeeping violations (size mismatches mid-run).
class EngineError : public Error {
public:
  using Error::Error;
};

// Bad inputs to analysis operations (empty populations, out-of-range t).
class AnalysisError : public Error {
public:
  using Error::Error;
};

// Exhaustive enumeration refused because the space exceeds its bound.
class OracleRefused : public Error {
public:
  using Error::Error;
};

} // namespace etm
