#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace emcs {

// Base of every error the engine raises. Callers that only need a message
// can catch this; the CLI maps subclasses onto exit codes.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// A knowledge base, element or belief set that does not belong to its logic.
class InvalidKb : public Error {
public:
    using Error::Error;
};

// A management function was handed an operation outside its management base.
class UnknownOperation : public Error {
public:
    using Error::Error;
};

// Malformed system: index out of range, shape mismatch, missing cost, ...
class MalformedSystem : public Error {
public:
    using Error::Error;
};

class BudgetExceeded : public Error {
public:
    using Error::Error;
};

class OracleCapExceeded : public Error {
public:
    using Error::Error;
};

class SizeExceedsObservations : public Error {
public:
    SizeExceedsObservations(std::size_t size, std::size_t steps)
        : Error("requested size " + std::to_string(size) + " exceeds the " + std::to_string(steps) +
                " available observation steps") {}
};

} // namespace emcs
