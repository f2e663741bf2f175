#pragma once

#include <stdexcept>
#include <string>

namespace purify {

// Parameter outside its documented range (channel strengths, probabilities,
// counts).
class InvalidParameter : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// Mathematical domain violation, e.g. an entropy ratio with a zero
// denominator or a state that cannot be purified.
class DomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

// A target rate or fidelity outside the interval spanned by the protocols.
class OutOfRange : public std::out_of_range {
 public:
  OutOfRange(const std::string& what, double lo, double hi)
      : std::out_of_range(what), lo_(lo), hi_(hi) {}
  double lo() const noexcept { return lo_; }
  double hi() const noexcept { return hi_; }

 private:
  double lo_;
  double hi_;
};

// A purification step with zero success probability.
class DegenerateStep : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Every denominator of the protocol-count threshold is non-positive.
class CutoffUndefined : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// The Markov chain would exceed the configured state cap.
class StateCapExceeded : public std::runtime_error {
 public:
  StateCapExceeded(const std::string& what, std::size_t states)
      : std::runtime_error(what), states_(states) {}
  std::size_t states() const noexcept { return states_; }

 private:
  std::size_t states_;
};

}  // namespace purify
