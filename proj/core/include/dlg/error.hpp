#pragma once

#include <stdexcept>
#include <string>

namespace dlg {

// Thrown when an iterative eigensolver exhausts its restart budget.
class NonConvergence : public std::runtime_error {
 public:
  NonConvergence(const std::string& what, double residual)
      : std::runtime_error(what), residual_(residual) {}
  double residual() const noexcept { return residual_; }

 private:
  double residual_;
};

// The move set does not connect the state space; carries one state from each
// of two different communicating classes.
class ReducibleMoveSet : public std::runtime_error {
 public:
  ReducibleMoveSet(const std::string& what, std::size_t a, std::size_t b)
      : std::runtime_error(what), state_a_(a), state_b_(b) {}
  std::size_t state_a() const noexcept { return state_a_; }
  std::size_t state_b() const noexcept { return state_b_; }

 private:
  std::size_t state_a_;
  std::size_t state_b_;
};

// ker B is not contained in ker A, so sup A(f)/B(f) is infinite.
class KernelContainmentError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace dlg
