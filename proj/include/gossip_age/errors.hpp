// Copyright 2026 The gossip-age Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace gossip_age {

enum class ErrorCode {
  NegativeRate,
  AsymmetricMobility,
  NonzeroDiagonal,
  ZeroSourceTotal,
  BadScale,
  SingularLevelSystem,
  CapExceeded,
  NoConvergence,
  DegenerateHorizon,
  RateOverflow,
  UnknownPreset,
  EmptyResult,
  ConfigError,
};

std::string_view to_string(ErrorCode code) noexcept;

/// Every failure raised by the library carries one of the codes above so
/// callers (the harness in particular) can report it per sweep point.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace gossip_age
