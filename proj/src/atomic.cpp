#include "sharpweak/atomic.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <ostream>
#include <sstream>
#include <stdexcept>

#include "sharpweak/errors.hpp"

namespace sharpweak {

namespace {

bool close_endpoint(double a, double b, double slack) {
  return std::abs(a - b) <= slack * std::max({1e-300, std::abs(a), std::abs(b)});
}

}  // namespace

AtomicMartingale::AtomicMartingale(double initial) {
  atoms_.push_back(Atom{Piece{0.0, 1.0, initial}, 0, -1, -1});
  live_.push_back(0);
}

void AtomicMartingale::add_step(std::span<const Refinement> refinements) {
  constexpr double kSlack = 1e-15;
  const int step = steps_;
  std::map<int, std::vector<int>> replaced;
  for (const auto& r : refinements) {
    if (r.atom < 0 || static_cast<std::size_t>(r.atom) >= atoms_.size() || atoms_[r.atom].died != -1) {
      throw ConstructionError("add_step: atom " + std::to_string(r.atom) + " is not alive at step " +
                              std::to_string(step - 1));
    }
    if (replaced.count(r.atom)) throw ConstructionError("add_step: atom " + std::to_string(r.atom) + " refined twice");
    if (r.pieces.empty()) throw ConstructionError("add_step: empty refinement");
    const Piece parent = atoms_[r.atom].piece;
    double cursor = parent.lo;
    for (const auto& pc : r.pieces) {
      if (!close_endpoint(pc.lo, cursor, kSlack) || !(pc.hi > pc.lo)) {
        std::ostringstream os;
        os.precision(17);
        os << "add_step: pieces of atom " << r.atom << " at step " << step << " do not tile [" << parent.lo << ", "
           << parent.hi << "] (piece [" << pc.lo << ", " << pc.hi << "])";
        throw ConstructionError(os.str());
      }
      cursor = pc.hi;
    }
    if (!close_endpoint(cursor, parent.hi, kSlack)) {
      throw ConstructionError("add_step: pieces of atom " + std::to_string(r.atom) + " stop short of its end");
    }
    std::vector<int> ids;
    for (const auto& pc : r.pieces) {
      ids.push_back(static_cast<int>(atoms_.size()));
      atoms_.push_back(Atom{pc, step, -1, r.atom});
    }
    replaced.emplace(r.atom, std::move(ids));
  }
  // live_ is ordered by interval, so each refined atom is found by its left
  // end and its children are spliced in place.
  for (const auto& [id, children] : replaced) {
    const double lo = atoms_[id].piece.lo;
    auto it = std::lower_bound(live_.begin(), live_.end(), lo,
                               [&](int l, double v) { return atoms_[l].piece.lo < v; });
    while (it != live_.end() && *it != id) ++it;
    if (it == live_.end()) throw ConstructionError("add_step: atom " + std::to_string(id) + " missing from live set");
    atoms_[id].died = step;
    *it = children.front();
    live_.insert(it + 1, children.begin() + 1, children.end());
  }
  ++steps_;
}

std::vector<int> AtomicMartingale::alive(int step) const {
  if (step < 0 || step >= steps_) throw std::out_of_range("AtomicMartingale: step out of range");
  if (step == last_step()) return live_;
  std::vector<int> out;
  for (std::size_t i = 0; i < atoms_.size(); ++i) {
    const Atom& a = atoms_[i];
    if (a.born <= step && (a.died == -1 || a.died > step)) out.push_back(static_cast<int>(i));
  }
  std::sort(out.begin(), out.end(), [&](int l, int r) { return atoms_[l].piece.lo < atoms_[r].piece.lo; });
  return out;
}

std::vector<Piece> AtomicMartingale::partition(int step) const {
  std::vector<Piece> out;
  for (int id : alive(step)) out.push_back(atoms_[id].piece);
  return out;
}

double AtomicMartingale::value_at(int step, double t) const {
  if (!(t >= 0.0 && t <= 1.0)) throw std::domain_error("value_at: t outside [0, 1]");
  // Descend from the root; children are contiguous and ordered.
  int id = 0;
  for (;;) {
    const Atom& a = atoms_[id];
    if (a.died == -1 || a.died > step) return a.piece.value;
    int next = -1;
    for (std::size_t c = static_cast<std::size_t>(id) + 1; c < atoms_.size(); ++c) {
      const Atom& child = atoms_[c];
      if (child.parent != id) continue;
      next = static_cast<int>(c);
      if (t <= child.piece.hi) break;
    }
    if (next == -1) throw std::logic_error("value_at: broken split tree");
    id = next;
  }
}

double AtomicMartingale::expectation(int step, const std::function<double(double)>& f) const {
  double sum = 0.0;
  for (int id : alive(step)) sum += atoms_[id].piece.length() * f(atoms_[id].piece.value);
  return sum;
}

MartingaleCheck AtomicMartingale::check_martingale(double rel_tol) const {
  MartingaleCheck out;
  std::vector<double> weighted(atoms_.size(), 0.0);
  std::vector<double> weighted_abs(atoms_.size(), 0.0);
  std::vector<bool> split(atoms_.size(), false);
  for (const Atom& a : atoms_) {
    if (a.parent < 0) continue;
    weighted[a.parent] += a.piece.length() * a.piece.value;
    weighted_abs[a.parent] += a.piece.length() * std::abs(a.piece.value);
    split[a.parent] = true;
  }
  for (std::size_t i = 0; i < atoms_.size(); ++i) {
    if (!split[i]) continue;
    const Piece& pc = atoms_[i].piece;
    const double mean = weighted[i] / pc.length();
    const double scale = std::max({std::abs(pc.value), weighted_abs[i] / pc.length(), 1e-300});
    const double rel = std::abs(mean - pc.value) / scale;
    if (rel > out.worst_rel) {
      out.worst_rel = rel;
      out.step = atoms_[i].died;
      out.atom = static_cast<int>(i);
    }
  }
  out.ok = out.worst_rel <= rel_tol;
  return out;
}

bool AtomicMartingale::check_nested(double slack) const {
  // add_step already enforces that children tile their parent; re-verify
  // that and that the live atoms of the last step tile [0, 1]. Every
  // earlier partition is then a coarsening of the last one.
  std::vector<double> cursor(atoms_.size(), std::nan(""));
  for (const Atom& a : atoms_) {
    if (a.parent < 0) continue;
    const Piece& parent = atoms_[a.parent].piece;
    double& c = cursor[a.parent];
    if (std::isnan(c)) c = parent.lo;
    if (!close_endpoint(a.piece.lo, c, slack) || a.born != atoms_[a.parent].died) return false;
    c = a.piece.hi;
  }
  for (std::size_t i = 0; i < atoms_.size(); ++i) {
    if (atoms_[i].died != -1 && !close_endpoint(cursor[i], atoms_[i].piece.hi, slack)) return false;
  }
  double c = 0.0;
  for (int id : live_) {
    if (!close_endpoint(atoms_[id].piece.lo, c, slack)) return false;
    c = atoms_[id].piece.hi;
  }
  return close_endpoint(c, 1.0, slack);
}

AtomicMartingale AtomicMartingale::affine(double a, double b) const {
  AtomicMartingale out = *this;
  for (Atom& atom : out.atoms_) atom.piece.value = a * atom.piece.value + b;
  return out;
}

std::vector<Piece> running_abs_max(const AtomicMartingale& f, int step) {
  const auto atoms = f.atoms();
  std::vector<double> amax(atoms.size());
  for (std::size_t i = 0; i < atoms.size(); ++i) {
    const double own = std::abs(atoms[i].piece.value);
    amax[i] = atoms[i].parent < 0 ? own : std::max(own, amax[static_cast<std::size_t>(atoms[i].parent)]);
  }
  std::vector<Piece> out;
  for (int id : f.alive(step)) out.push_back(Piece{atoms[id].piece.lo, atoms[id].piece.hi, amax[id]});
  return out;
}

namespace {

double pth_norm(std::span<const Piece> pieces, double p) {
  const double first = std::abs(pieces.front().value);
  const bool constant = std::all_of(pieces.begin(), pieces.end(),
                                    [&](const Piece& pc) { return std::abs(pc.value) == first; });
  if (constant) return first;
  double sum = 0.0;
  for (const auto& pc : pieces) sum += pc.length() * std::pow(std::abs(pc.value), p);
  return std::pow(sum, 1.0 / p);
}

}  // namespace

double strong_norm(const AtomicMartingale& f, double p) {
  if (!(p > 0.0)) throw std::domain_error("strong_norm: needs p > 0");
  double best = 0.0;
  for (int n = 0; n < f.steps(); ++n) best = std::max(best, pth_norm(f.partition(n), p));
  return best;
}

double weak_norm(const AtomicMartingale& f, double p) {
  if (!(p > 0.0)) throw std::domain_error("weak_norm: needs p > 0");
  auto pieces = running_abs_max(f, f.last_step());
  std::sort(pieces.begin(), pieces.end(), [](const Piece& l, const Piece& r) { return l.value > r.value; });
  double best = 0.0;
  double measure = 0.0;
  for (std::size_t i = 0; i < pieces.size(); ++i) {
    measure += pieces[i].length();
    // Only evaluate once every atom at this level has been counted.
    if (i + 1 < pieces.size() && pieces[i + 1].value == pieces[i].value) continue;
    const double lambda = pieces[i].value;
    const bool full = i + 1 == pieces.size();
    best = std::max(best, full ? lambda : lambda * std::pow(measure, 1.0 / p));
  }
  return best;
}

void write_trajectories_csv(std::ostream& os, std::span<const AtomicMartingale* const> processes,
                            std::span<const char* const> names) {
  if (processes.empty() || processes.size() != names.size()) {
    throw std::invalid_argument("write_trajectories_csv: need one name per process");
  }
  const AtomicMartingale& first = *processes.front();
  for (const auto* proc : processes) {
    if (proc->steps() != first.steps() || proc->atoms().size() != first.atoms().size()) {
      throw std::invalid_argument("write_trajectories_csv: processes do not share a split tree");
    }
  }
  os << "step,lo,hi";
  for (const char* n : names) os << ',' << n;
  os << '\n';
  const auto old = os.precision(17);
  for (int n = 0; n < first.steps(); ++n) {
    for (int id : first.alive(n)) {
      const Piece& pc = first.atoms()[id].piece;
      os << n << ',' << pc.lo << ',' << pc.hi;
      for (const auto* proc : processes) os << ',' << proc->atoms()[id].piece.value;
      os << '\n';
    }
  }
  os.precision(old);
}

}  // namespace sharpweak
