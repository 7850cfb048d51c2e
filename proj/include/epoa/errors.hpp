#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace epoa {

// Base of every error raised by the library. The CLI maps subclasses to exit
// codes, so new error kinds should derive from the closest existing one.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class MalformedContext : public Error {
 public:
  using Error::Error;
};

class ParseError : public Error {
 public:
  ParseError(std::size_t line, const std::string& reason)
      : Error("line " + std::to_string(line) + ": " + reason), line_(line) {}
  std::size_t line() const { return line_; }

 private:
  std::size_t line_;
};

class ValidationError : public Error {
 public:
  ValidationError(std::string record_id, const std::string& reason)
      : Error("record '" + record_id + "': " + reason),
        record_id_(std::move(record_id)) {}
  const std::string& record_id() const { return record_id_; }

 private:
  std::string record_id_;
};

class BidCapTooLow : public Error {
 public:
  explicit BidCapTooLow(std::string bidder)
      : Error("bid cap does not guarantee top rank for bidder '" + bidder +
              "'"),
        bidder_(std::move(bidder)) {}
  const std::string& bidder() const { return bidder_; }

 private:
  std::string bidder_;
};

class NeverAllocated : public Error {
 public:
  explicit NeverAllocated(std::string bidder)
      : Error("bidder '" + bidder + "' is never allocated at any grid bid"),
        bidder_(std::move(bidder)) {}
  const std::string& bidder() const { return bidder_; }

 private:
  std::string bidder_;
};

class OutOfRange : public Error {
 public:
  using Error::Error;
};

class ZeroRevenue : public Error {
 public:
  ZeroRevenue() : Error("expected revenue is zero; revenue covering undefined") {}
};

class NonPositiveMu : public Error {
 public:
  NonPositiveMu() : Error("revenue covering parameter must be positive") {}
};

class DomainError : public Error {
 public:
  using Error::Error;
};

class EmptyBidderSet : public Error {
 public:
  EmptyBidderSet() : Error("no bidder is ever allocated") {}
};

class SpecError : public Error {
 public:
  using Error::Error;
};

}  // namespace epoa
