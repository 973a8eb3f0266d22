#pragma once

#include <stdexcept>
#include <string>

namespace ioaware {

/// Base class for every error raised by the engine.
class Error : public std::runtime_error {
public:
   using std::runtime_error::runtime_error;
};

/// A caller broke an operation's precondition (e.g. completing a task that is not running).
class ContractViolation : public Error {
public:
   using Error::Error;
};

/// The workload or cluster description is malformed.
class WorkloadError : public Error {
public:
   using Error::Error;
};

/// A bandwidth constraint no node can ever satisfy.
class UnsatisfiableConstraint : public Error {
public:
   using Error::Error;
};

/// The run can make no further progress although tasks remain.
class DeadlockError : public Error {
public:
   using Error::Error;
};

} // namespace ioaware
