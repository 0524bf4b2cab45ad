#pragma once

#include <stdexcept>
#include <string>

namespace soatest {

enum class Errc {
  DuplicateId,
  InvalidDescriptor,
  UnknownService,
  UnknownOperation,
  UnknownCase,
  UnknownRun,
  UnknownAgent,
  ArityMismatch,
  IllegalTransition,
  OracleAbsent,
  OracleFailure,
  MalformedRequest,
  MalformedResponse,
  UnsupportedProtocol,
  StoreUnavailable,
  AcquireTimeout,
  Timeout,
  ConnectionRefused,
  TransportError,
  BindFailure,
  NoCases,
  BadValue,
};

const char* errc_name(Errc code) noexcept;

/// Exception carrying a stable error code plus a human-readable detail.
class Error : public std::runtime_error {
 public:
  Error(Errc code, const std::string& detail)
      : std::runtime_error(std::string(errc_name(code)) + ": " + detail), code_(code) {}

  Errc code() const noexcept { return code_; }

 private:
  Errc code_;
};

}  // namespace soatest
