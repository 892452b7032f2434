#pragma once

#include <functional>
#include <iosfwd>
#include <span>
#include <vector>

namespace sharpweak {

// A constant value on an interval of [0, 1] with Lebesgue measure. Whether
// the endpoints belong to the interval does not matter for any quantity
// computed here.
struct Piece {
  double lo = 0.0;
  double hi = 0.0;
  double value = 0.0;

  double length() const { return hi - lo; }
};

// An atom lives on steps [born, died); died == -1 while it is alive at
// the last step. parent is -1 for the initial atom.
struct Atom {
  Piece piece;
  int born = 0;
  int died = -1;
  int parent = -1;
};

// Replace the live atom `atom` by `pieces` at the next step. The pieces
// must tile the atom's interval in increasing order.
struct Refinement {
  int atom = 0;
  std::vector<Piece> pieces;
};

struct MartingaleCheck {
  bool ok = true;
  double worst_rel = 0.0;
  int step = -1;  // step of the worst atom split, -1 if none
  int atom = -1;
};

// A discrete-time process on ([0, 1], Lebesgue) adapted to a filtration of
// finite interval partitions. Stored as a split tree: each step replaces
// some atoms by finer ones and keeps the rest, so a process whose steps
// touch O(1) atoms costs O(steps) memory.
class AtomicMartingale {
 public:
  // Constant `initial` on [0, 1] at step 0.
  explicit AtomicMartingale(double initial);

  // Appends a step. Atoms not refined carry over unchanged. Throws
  // ConstructionError if an atom is not alive, refined twice, or its pieces
  // do not tile its interval (1e-15 relative slack on shared endpoints).
  void add_step(std::span<const Refinement> refinements);

  // Number of steps, counting step 0.
  int steps() const { return steps_; }
  int last_step() const { return steps_ - 1; }

  std::span<const Atom> atoms() const { return atoms_; }

  // Atom ids alive at `step`, ordered by interval.
  std::vector<int> alive(int step) const;
  std::vector<Piece> partition(int step) const;

  // Value at time step `step` on the atom containing t.
  double value_at(int step, double t) const;

  // Sum of length * f(value) over the atoms alive at `step`.
  double expectation(int step, const std::function<double(double)>& f) const;

  // For each split, the length-weighted mean of the children against the
  // parent's value; relative error measured against max(|parent|, mean |child|).
  MartingaleCheck check_martingale(double rel_tol = 1e-12) const;

  // Children tile their parent and the live atoms at every step tile [0, 1].
  bool check_nested(double slack = 1e-15) const;

  // a * value + b on every atom; same tree.
  AtomicMartingale affine(double a, double b) const;

 private:
  int steps_ = 1;
  std::vector<Atom> atoms_;
  std::vector<int> live_;  // alive at the last step, ordered by interval
};

// Largest |value| over steps 0..step seen on each atom alive at `step`,
// i.e. the running maximum of |f| evaluated at `step`.
std::vector<Piece> running_abs_max(const AtomicMartingale& f, int step);

// sup_n ||f_n||_p. A step whose atoms share one |value| c contributes c
// exactly, without going through pow.
double strong_norm(const AtomicMartingale& f, double p);

// sup_lambda lambda * P(f* >= lambda)^{1/p}, f* the running maximum of |f|
// up to the last step. The supremum is attained at a value of f*; a level
// of full measure contributes lambda exactly.
double weak_norm(const AtomicMartingale& f, double p);

// CSV "step,lo,hi,<names...>" with one row per live atom per step. All
// processes must share the same split tree.
void write_trajectories_csv(std::ostream& os, std::span<const AtomicMartingale* const> processes,
                            std::span<const char* const> names);

}  // namespace sharpweak
