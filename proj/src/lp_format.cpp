#include "rinp/lp.hpp"

#include <cmath>
#include <ostream>

namespace rinp {

namespace {

std::string var_name(const LinearProgram& lp, int j) {
  if (!lp.vars[j].name.empty()) return lp.vars[j].name;
  return "x" + std::to_string(j);
}

void write_terms(std::ostream& os, const LinearProgram& lp,
                 const std::vector<std::pair<int, double>>& terms) {
  bool first = true;
  for (auto [j, v] : terms) {
    if (v == 0.0) continue;
    if (first) {
      if (v < 0) os << "- ";
      first = false;
    } else {
      os << (v < 0 ? " - " : " + ");
    }
    double a = std::fabs(v);
    if (a != 1.0) os << a << " ";
    os << var_name(lp, j);
  }
  if (first) os << "0 " << var_name(lp, 0);
}

}  // namespace

void write_lp_format(const LinearProgram& lp, std::ostream& os) {
  os << (lp.sense == ObjSense::maximize ? "Maximize" : "Minimize") << "\n obj: ";
  std::vector<std::pair<int, double>> obj;
  for (size_t j = 0; j < lp.obj.size(); ++j)
    if (lp.obj[j] != 0.0) obj.push_back({static_cast<int>(j), lp.obj[j]});
  write_terms(os, lp, obj);
  os << "\nSubject To\n";
  for (size_t i = 0; i < lp.rows.size(); ++i) {
    const auto& row = lp.rows[i];
    os << " " << (row.name.empty() ? "c" + std::to_string(i) : row.name) << ": ";
    write_terms(os, lp, row.coef);
    switch (row.rel) {
      case Relation::le: os << " <= "; break;
      case Relation::ge: os << " >= "; break;
      case Relation::eq: os << " = "; break;
    }
    os << row.rhs << "\n";
  }
  os << "Bounds\n";
  for (size_t j = 0; j < lp.vars.size(); ++j) {
    const auto& v = lp.vars[j];
    if (v.lb == 0.0 && v.ub == kInf) continue;  // LP-format default
    os << " ";
    if (v.lb == v.ub) {
      os << var_name(lp, static_cast<int>(j)) << " = " << v.lb;
    } else {
      if (v.lb == -kInf) os << "-inf";
      else os << v.lb;
      os << " <= " << var_name(lp, static_cast<int>(j)) << " <= ";
      if (v.ub == kInf) os << "+inf";
      else os << v.ub;
    }
    os << "\n";
  }
  bool any_int = false;
  for (size_t j = 0; j < lp.vars.size(); ++j) {
    if (!lp.vars[j].integer) continue;
    if (!any_int) {
      os << "Generals\n";
      any_int = true;
    }
    os << " " << var_name(lp, static_cast<int>(j)) << "\n";
  }
  os << "End\n";
}

}  // namespace rinp
