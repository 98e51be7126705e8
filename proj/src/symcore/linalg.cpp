#include "repargen/linalg.hpp"

#include <algorithm>
#include <map>
#include <stdexcept>

namespace repargen {

Rref rref(Matrix m, std::size_t cols) {
  Rref out;
  std::size_t r = 0;
  for (std::size_t c = 0; c < cols && r < m.size(); ++c) {
    std::size_t p = r;
    while (p < m.size() && m[p][c] == 0) ++p;
    if (p == m.size()) continue;
    std::swap(m[r], m[p]);
    Rational inv = 1 / m[r][c];
    for (std::size_t j = c; j < cols; ++j) m[r][j] *= inv;
    for (std::size_t i = 0; i < m.size(); ++i) {
      if (i == r || m[i][c] == 0) continue;
      Rational f = m[i][c];
      for (std::size_t j = c; j < cols; ++j)
        if (m[r][j] != 0) m[i][j] -= f * m[r][j];
    }
    out.pivots.push_back(c);
    ++r;
  }
  m.resize(r);
  out.rows = std::move(m);
  return out;
}

std::vector<Vector> nullspace(const Rref& r, std::size_t cols) {
  std::vector<bool> is_pivot(cols, false);
  for (auto p : r.pivots) is_pivot[p] = true;
  std::vector<Vector> basis;
  for (std::size_t f = 0; f < cols; ++f) {
    if (is_pivot[f]) continue;
    Vector v(cols, Rational(0));
    v[f] = 1;
    for (std::size_t i = 0; i < r.pivots.size(); ++i) v[r.pivots[i]] = -r.rows[i][f];
    basis.push_back(std::move(v));
  }
  return basis;
}

std::vector<Vector> nullspace(const Matrix& m, std::size_t cols) { return nullspace(rref(m, cols), cols); }

std::size_t rank(const Matrix& m, std::size_t cols) { return rref(m, cols).rank(); }

bool IncrementalEchelon::add_row(Vector row) {
  if (row.size() != cols_) throw std::invalid_argument("row length mismatch");
  for (std::size_t c = 0; c < cols_; ++c) {
    if (row[c] == 0) continue;
    if (pivot_row_[c] == npos) {
      Rational inv = 1 / row[c];
      for (std::size_t j = c; j < cols_; ++j) row[j] *= inv;
      pivot_row_[c] = rows_.size();
      rows_.push_back(std::move(row));
      return true;
    }
    const Vector& p = rows_[pivot_row_[c]];
    Rational f = row[c];
    for (std::size_t j = c; j < cols_; ++j)
      if (p[j] != 0) row[j] -= f * p[j];
  }
  return false;
}

// ------------------------------------------------------------------ sparse

namespace {

// a - f*b for sorted sparse rows
SparseRow axpy(const SparseRow& a, const Rational& f, const SparseRow& b) {
  SparseRow r;
  r.reserve(a.size() + b.size());
  std::size_t i = 0, j = 0;
  while (i < a.size() || j < b.size()) {
    if (j == b.size() || (i < a.size() && a[i].first < b[j].first)) {
      r.push_back(a[i++]);
    } else if (i == a.size() || b[j].first < a[i].first) {
      r.emplace_back(b[j].first, -f * b[j].second);
      ++j;
    } else {
      Rational v = a[i].second - f * b[j].second;
      if (v != 0) r.emplace_back(a[i].first, std::move(v));
      ++i, ++j;
    }
  }
  return r;
}

}  // namespace

std::vector<SparseRow> sparse_nullspace(const SparseSystem& s) {
  const std::size_t n = s.cols;
  // 1. singleton propagation: a row with one nonzero forces that unknown to 0
  std::vector<bool> zero(n, false);
  std::vector<SparseRow> rows;
  rows.reserve(s.rows.size());
  for (auto& r : s.rows)
    if (!r.empty()) rows.push_back(r);
  for (bool changed = true; changed;) {
    changed = false;
    for (auto& r : rows) {
      if (r.empty()) continue;
      r.erase(std::remove_if(r.begin(), r.end(), [&](auto& e) { return zero[e.first]; }), r.end());
      if (r.size() == 1) {
        zero[r[0].first] = true;
        r.clear();
        changed = true;
      }
    }
  }
  // 2. sparse echelon with leftmost pivots; pivot rows are normalized
  std::map<std::size_t, SparseRow> pivots;
  for (auto& r : rows) {
    SparseRow row = std::move(r);
    while (!row.empty()) {
      std::size_t lead = row.front().first;
      auto it = pivots.find(lead);
      if (it == pivots.end()) {
        Rational inv = 1 / row.front().second;
        for (auto& e : row) e.second *= inv;
        pivots.emplace(lead, std::move(row));
        break;
      }
      row = axpy(row, row.front().second, it->second);
    }
  }
  // 3. back substitution to reduced form, highest pivot first
  for (auto it = pivots.rbegin(); it != pivots.rend(); ++it) {
    std::size_t p = it->first;
    for (auto jt = pivots.begin(); jt->first < p; ++jt) {
      SparseRow& row = jt->second;
      auto e = std::lower_bound(row.begin(), row.end(), p, [](auto& a, std::size_t c) { return a.first < c; });
      if (e == row.end() || e->first != p) continue;
      Rational f = e->second;
      row = axpy(row, f, it->second);
    }
  }
  // 4. canonical basis over the free columns
  std::vector<std::vector<std::pair<std::size_t, Rational>>> by_free(n);
  for (auto& [p, row] : pivots)
    for (auto& [c, v] : row)
      if (c != p) by_free[c].emplace_back(p, -v);
  std::vector<SparseRow> basis;
  for (std::size_t f = 0; f < n; ++f) {
    if (zero[f] || pivots.count(f)) continue;
    SparseRow v = std::move(by_free[f]);
    v.emplace_back(f, Rational(1));
    std::sort(v.begin(), v.end(), [](auto& a, auto& b) { return a.first < b.first; });
    basis.push_back(std::move(v));
  }
  return basis;
}

}  // namespace repargen
