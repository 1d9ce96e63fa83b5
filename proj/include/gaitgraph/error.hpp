#pragma once

#include <stdexcept>
#include <string>

namespace gaitgraph {

// Base of every error raised by the library. Subclasses name the failure
// class so callers (and the CLI exit path) can tell them apart.
class Error : public std::runtime_error {
   public:
    using std::runtime_error::runtime_error;
};

class TopologyError : public Error {
   public:
    using Error::Error;
};

class ShapeError : public Error {
   public:
    using Error::Error;
};

class DegenerateError : public Error {
   public:
    using Error::Error;
};

class OptimizerError : public Error {
   public:
    using Error::Error;
};

class FormatError : public Error {
   public:
    using Error::Error;
};

class ParseError : public Error {
   public:
    ParseError(const std::string& what, std::size_t row)
        : Error("row " + std::to_string(row) + ": " + what), row_(row) {}

    std::size_t row() const { return row_; }

   private:
    std::size_t row_;
};

class IndexingError : public Error {
   public:
    using Error::Error;
};

class ContractError : public Error {
   public:
    using Error::Error;
};

class ProtocolError : public Error {
   public:
    using Error::Error;
};

}  // namespace gaitgraph
