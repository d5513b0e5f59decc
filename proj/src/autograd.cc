// Copyright 2026 The lingmt Authors. All Rights Reserved.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//    http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.
// ==============================================================================

#include "lingmt/autograd.h"

#include <cmath>
#include <limits>

#include "lingmt/common.h"

namespace lingmt {

// ---------------------------------------------------------------------------
// ModelParams

Matrix& ModelParams::add(const std::string& name, int rows, int cols) {
  auto [it, inserted] = tensors_.emplace(name, Matrix::Zero(rows, cols));
  if (!inserted) throw ShapeError("parameter '" + name + "' already exists");
  return it->second;
}

const Matrix& ModelParams::at(const std::string& name) const {
  auto it = tensors_.find(name);
  if (it == tensors_.end()) throw ShapeError("unknown parameter '" + name + "'");
  return it->second;
}

Matrix& ModelParams::at(const std::string& name) {
  auto it = tensors_.find(name);
  if (it == tensors_.end()) throw ShapeError("unknown parameter '" + name + "'");
  return it->second;
}

size_t ModelParams::parameter_count() const {
  size_t n = 0;
  for (const auto& [name, t] : tensors_) n += static_cast<size_t>(t.size());
  return n;
}

void ModelParams::round_to_storage() {
  for (auto& [name, t] : tensors_)
    t = t.unaryExpr([](double v) { return static_cast<double>(static_cast<float>(v)); });
}

bool ModelParams::operator==(const ModelParams& other) const {
  if (tensors_.size() != other.tensors_.size()) return false;
  for (const auto& [name, t] : tensors_) {
    auto it = other.tensors_.find(name);
    if (it == other.tensors_.end()) return false;
    if (t.rows() != it->second.rows() || t.cols() != it->second.cols())
      return false;
    if (t != it->second) return false;
  }
  return true;
}

// ---------------------------------------------------------------------------
// Tape

const Matrix& Var::value() const { return tape->value(id); }

Var Tape::constant(Matrix value) {
  nodes_.push_back({std::move(value), Matrix(), nullptr, {}});
  return {this, static_cast<int>(nodes_.size()) - 1};
}

Var Tape::param(const std::string& name) {
  if (params_ == nullptr) throw ShapeError("tape has no parameter store");
  auto it = param_nodes_.find(name);
  if (it != param_nodes_.end()) return {this, it->second};
  nodes_.push_back({params_->at(name), Matrix(), nullptr, name});
  const int id = static_cast<int>(nodes_.size()) - 1;
  param_nodes_.emplace(name, id);
  return {this, id};
}

Var Tape::record(Matrix value, Backward backward) {
  nodes_.push_back({std::move(value), Matrix(), std::move(backward), {}});
  return {this, static_cast<int>(nodes_.size()) - 1};
}

void Tape::accumulate(int id, const Matrix& g) {
  Node& n = nodes_[id];
  if (n.grad.size() == 0)
    n.grad = g;
  else
    n.grad += g;
}

const Matrix* Tape::grad(int id) const {
  const Node& n = nodes_[id];
  return n.grad.size() == 0 ? nullptr : &n.grad;
}

void Tape::backward(Var loss) {
  if (loss.value().rows() != 1 || loss.value().cols() != 1)
    throw ShapeError("backward(loss) needs a 1x1 loss");
  backward({{loss, Matrix::Ones(1, 1)}});
}

void Tape::backward(const std::vector<std::pair<Var, Matrix>>& seeds) {
  if (backward_done_) throw ShapeError("tape already backpropagated");
  for (const auto& [var, g] : seeds) {
    if (var.tape != this) throw ShapeError("seed belongs to another tape");
    if (g.rows() != var.rows() || g.cols() != var.cols())
      throw ShapeError("seed gradient shape mismatch");
    accumulate(var.id, g);
  }
  run_backward();
  backward_done_ = true;
}

void Tape::run_backward() {
  for (int i = static_cast<int>(nodes_.size()) - 1; i >= 0; --i) {
    Node& n = nodes_[i];
    if (!n.backward || n.grad.size() == 0) continue;
    n.backward(*this, n.grad);
  }
}

GradientSet Tape::parameter_gradients() const {
  GradientSet out;
  if (params_ == nullptr) return out;
  for (const auto& [name, t] : params_->tensors()) {
    auto it = param_nodes_.find(name);
    const Matrix* g = it == param_nodes_.end() ? nullptr : grad(it->second);
    out.emplace(name, g ? *g : Matrix::Zero(t.rows(), t.cols()));
  }
  return out;
}

// ---------------------------------------------------------------------------
// Operations

namespace ops {

namespace {

void check(bool ok, const char* op, const std::string& detail) {
  if (!ok) throw ShapeError(std::string(op) + ": " + detail);
}

std::string dims(const Matrix& m) {
  return std::to_string(m.rows()) + "x" + std::to_string(m.cols());
}

Tape& same_tape(Var a, Var b) {
  check(a.tape == b.tape && a.tape != nullptr, "op", "operands on different tapes");
  return *a.tape;
}

}  // namespace

Var matmul(Var a, Var b) {
  Tape& t = same_tape(a, b);
  check(a.cols() == b.rows(), "matmul", dims(a.value()) + " * " + dims(b.value()));
  const int ia = a.id, ib = b.id;
  return t.record(a.value() * b.value(), [ia, ib](Tape& t, const Matrix& g) {
    t.accumulate_with(ia, [&](Matrix& ga) { ga.noalias() += g * t.value(ib).transpose(); });
    t.accumulate_with(ib, [&](Matrix& gb) { gb.noalias() += t.value(ia).transpose() * g; });
  });
}

Var matmul_nt(Var a, Var b) {
  Tape& t = same_tape(a, b);
  check(a.cols() == b.cols(), "matmul_nt", dims(a.value()) + " * " + dims(b.value()) + "^T");
  const int ia = a.id, ib = b.id;
  return t.record(a.value() * b.value().transpose(), [ia, ib](Tape& t, const Matrix& g) {
    t.accumulate_with(ia, [&](Matrix& ga) { ga.noalias() += g * t.value(ib); });
    t.accumulate_with(ib, [&](Matrix& gb) { gb.noalias() += g.transpose() * t.value(ia); });
  });
}

Var transpose(Var a) {
  const int ia = a.id;
  return a.tape->record(a.value().transpose(), [ia](Tape& t, const Matrix& g) {
    t.accumulate_with(ia, [&](Matrix& ga) { ga += g.transpose(); });
  });
}

Var add(Var a, Var b) {
  Tape& t = same_tape(a, b);
  check(a.rows() == b.rows() && a.cols() == b.cols(), "add",
        dims(a.value()) + " + " + dims(b.value()));
  const int ia = a.id, ib = b.id;
  return t.record(a.value() + b.value(), [ia, ib](Tape& t, const Matrix& g) {
    t.accumulate(ia, g);
    t.accumulate(ib, g);
  });
}

Var sub(Var a, Var b) {
  Tape& t = same_tape(a, b);
  check(a.rows() == b.rows() && a.cols() == b.cols(), "sub",
        dims(a.value()) + " - " + dims(b.value()));
  const int ia = a.id, ib = b.id;
  return t.record(a.value() - b.value(), [ia, ib](Tape& t, const Matrix& g) {
    t.accumulate(ia, g);
    t.accumulate_with(ib, [&](Matrix& gb) { gb -= g; });
  });
}

Var scale(Var a, double s) {
  const int ia = a.id;
  return a.tape->record(a.value() * s, [ia, s](Tape& t, const Matrix& g) {
    t.accumulate_with(ia, [&](Matrix& ga) { ga += g * s; });
  });
}

Var add_row(Var a, Var row) {
  Tape& t = same_tape(a, row);
  check(row.rows() == 1 && row.cols() == a.cols(), "add_row",
        dims(a.value()) + " + row " + dims(row.value()));
  const int ia = a.id, ir = row.id;
  Matrix out = a.value();
  out.rowwise() += row.value().row(0);
  return t.record(std::move(out), [ia, ir](Tape& t, const Matrix& g) {
    t.accumulate(ia, g);
    t.accumulate_with(ir, [&](Matrix& gr) { gr += g.colwise().sum(); });
  });
}

Var linear(Var x, Var w, Var b) {
  Tape& t = same_tape(x, w);
  check(x.cols() == w.rows(), "linear", dims(x.value()) + " * " + dims(w.value()));
  check(b.rows() == 1 && b.cols() == w.cols(), "linear", "bias " + dims(b.value()));
  const int ix = x.id, iw = w.id, ib = b.id;
  Matrix out = x.value() * w.value();
  out.rowwise() += b.value().row(0);
  return t.record(std::move(out), [ix, iw, ib](Tape& t, const Matrix& g) {
    t.accumulate_with(ix, [&](Matrix& gx) { gx.noalias() += g * t.value(iw).transpose(); });
    t.accumulate_with(iw, [&](Matrix& gw) { gw.noalias() += t.value(ix).transpose() * g; });
    t.accumulate_with(ib, [&](Matrix& gb) { gb += g.colwise().sum(); });
  });
}

Var gelu(Var x) {
  const int ix = x.id;
  constexpr double kInvSqrt2 = 0.70710678118654752440;
  Matrix out = x.value().unaryExpr(
      [](double v) { return 0.5 * v * (1.0 + std::erf(v * kInvSqrt2)); });
  return x.tape->record(std::move(out), [ix](Tape& t, const Matrix& g) {
    constexpr double kInvSqrt2Pi = 0.39894228040143267794;
    const Matrix& xv = t.value(ix);
    Matrix d = xv.unaryExpr([](double v) {
      return 0.5 * (1.0 + std::erf(v * kInvSqrt2)) +
             v * kInvSqrt2Pi * std::exp(-0.5 * v * v);
    });
    t.accumulate_with(ix, [&](Matrix& gx) { gx.array() += g.array() * d.array(); });
  });
}

Var tanh(Var x) {
  const int ix = x.id;
  Matrix out = x.value().array().tanh().matrix();
  const int self = static_cast<int>(x.tape->size());
  return x.tape->record(std::move(out), [ix, self](Tape& t, const Matrix& g) {
    const Matrix& y = t.value(self);
    t.accumulate_with(ix, [&](Matrix& gx) {
      gx.array() += g.array() * (1.0 - y.array().square());
    });
  });
}

Var layer_norm(Var x, Var gain, Var bias, double eps) {
  Tape& t = same_tape(x, gain);
  const Eigen::Index n = x.rows(), d = x.cols();
  check(gain.rows() == 1 && gain.cols() == d && bias.rows() == 1 &&
            bias.cols() == d,
        "layer_norm", "gain/bias must be 1x" + std::to_string(d));
  Matrix xhat(n, d);
  Eigen::VectorXd inv(n);
  const Matrix& xv = x.value();
  for (Eigen::Index r = 0; r < n; ++r) {
    const double mean = xv.row(r).mean();
    const double var = (xv.row(r).array() - mean).square().mean();
    inv(r) = 1.0 / std::sqrt(var + eps);
    xhat.row(r) = (xv.row(r).array() - mean) * inv(r);
  }
  Matrix out = xhat.array().rowwise() * gain.value().row(0).array();
  out.rowwise() += bias.value().row(0);
  const int ix = x.id, ig = gain.id, ib = bias.id;
  return t.record(std::move(out), [ix, ig, ib, xhat, inv](Tape& t, const Matrix& g) {
    const Matrix& gv = t.value(ig);
    const double dd = static_cast<double>(xhat.cols());
    Matrix dxhat = g.array().rowwise() * gv.row(0).array();
    t.accumulate_with(ix, [&](Matrix& gx) {
      for (Eigen::Index r = 0; r < xhat.rows(); ++r) {
        const double s1 = dxhat.row(r).sum();
        const double s2 = dxhat.row(r).dot(xhat.row(r));
        gx.row(r).array() += (inv(r) / dd) * (dd * dxhat.row(r).array() - s1 -
                                              xhat.row(r).array() * s2);
      }
    });
    t.accumulate_with(ig, [&](Matrix& gg) {
      gg += (g.array() * xhat.array()).colwise().sum().matrix();
    });
    t.accumulate_with(ib, [&](Matrix& gb) { gb += g.colwise().sum(); });
  });
}

Var gather_rows(Var table, const std::vector<int>& ids) {
  const Matrix& tv = table.value();
  Matrix out(static_cast<Eigen::Index>(ids.size()), tv.cols());
  for (size_t i = 0; i < ids.size(); ++i) {
    check(ids[i] >= 0 && ids[i] < tv.rows(), "gather_rows",
          "row " + std::to_string(ids[i]) + " outside table of " +
              std::to_string(tv.rows()) + " rows");
    out.row(static_cast<Eigen::Index>(i)) = tv.row(ids[i]);
  }
  const int it = table.id;
  return table.tape->record(std::move(out), [it, ids](Tape& t, const Matrix& g) {
    t.accumulate_with(it, [&](Matrix& gt) {
      for (size_t i = 0; i < ids.size(); ++i)
        gt.row(ids[i]) += g.row(static_cast<Eigen::Index>(i));
    });
  });
}

Var concat_rows(const std::vector<Var>& parts) {
  check(!parts.empty(), "concat_rows", "no inputs");
  Tape& t = *parts[0].tape;
  Eigen::Index rows = 0;
  const Eigen::Index cols = parts[0].cols();
  std::vector<int> ids;
  std::vector<Eigen::Index> offsets;
  for (const Var& p : parts) {
    check(p.tape == &t && p.cols() == cols, "concat_rows", "column mismatch");
    ids.push_back(p.id);
    offsets.push_back(rows);
    rows += p.rows();
  }
  Matrix out(rows, cols);
  for (size_t i = 0; i < parts.size(); ++i)
    out.middleRows(offsets[i], parts[i].rows()) = parts[i].value();
  return t.record(std::move(out), [ids, offsets](Tape& t, const Matrix& g) {
    for (size_t i = 0; i < ids.size(); ++i) {
      const Eigen::Index r = t.value(ids[i]).rows();
      t.accumulate_with(ids[i], [&](Matrix& gp) { gp += g.middleRows(offsets[i], r); });
    }
  });
}

Var attention(Var q, Var k, Var v, int heads,
              const std::vector<bool>& valid_key) {
  Tape& t = same_tape(q, k);
  const Eigen::Index n = q.rows(), d = q.cols();
  check(k.rows() == n && v.rows() == n && k.cols() == d && v.cols() == d,
        "attention", "q/k/v shapes differ");
  check(heads > 0 && d % heads == 0, "attention", "width not divisible by heads");
  check(static_cast<Eigen::Index>(valid_key.size()) == n, "attention",
        "key mask length");
  const Eigen::Index dh = d / heads;
  const double inv_sqrt = 1.0 / std::sqrt(static_cast<double>(dh));
  std::vector<Matrix> probs(heads);
  Matrix out(n, d);
  for (int h = 0; h < heads; ++h) {
    const auto qh = q.value().middleCols(h * dh, dh);
    const auto kh = k.value().middleCols(h * dh, dh);
    const auto vh = v.value().middleCols(h * dh, dh);
    Matrix s = (qh * kh.transpose()) * inv_sqrt;
    for (Eigen::Index r = 0; r < n; ++r) {
      double mx = -std::numeric_limits<double>::infinity();
      for (Eigen::Index c = 0; c < n; ++c)
        if (valid_key[c]) mx = std::max(mx, s(r, c));
      double total = 0.0;
      for (Eigen::Index c = 0; c < n; ++c) {
        s(r, c) = valid_key[c] ? std::exp(s(r, c) - mx) : 0.0;
        total += s(r, c);
      }
      s.row(r) /= total;
    }
    out.middleCols(h * dh, dh).noalias() = s * vh;
    probs[h] = std::move(s);
  }
  const int iq = q.id, ik = k.id, iv = v.id;
  return t.record(std::move(out), [iq, ik, iv, heads, dh, inv_sqrt,
                                   probs](Tape& t, const Matrix& g) {
    const Eigen::Index n = g.rows();
    Matrix gq = Matrix::Zero(n, heads * dh), gk = Matrix::Zero(n, heads * dh),
           gv = Matrix::Zero(n, heads * dh);
    for (int h = 0; h < heads; ++h) {
      const auto qh = t.value(iq).middleCols(h * dh, dh);
      const auto kh = t.value(ik).middleCols(h * dh, dh);
      const auto vh = t.value(iv).middleCols(h * dh, dh);
      const auto gh = g.middleCols(h * dh, dh);
      const Matrix& p = probs[h];
      Matrix dp = gh * vh.transpose();
      gv.middleCols(h * dh, dh).noalias() += p.transpose() * gh;
      Eigen::VectorXd rowdot = (dp.array() * p.array()).rowwise().sum();
      Matrix ds = p.array() * (dp.colwise() - rowdot).array();
      gq.middleCols(h * dh, dh).noalias() += (ds * kh) * inv_sqrt;
      gk.middleCols(h * dh, dh).noalias() += (ds.transpose() * qh) * inv_sqrt;
    }
    t.accumulate(iq, gq);
    t.accumulate(ik, gk);
    t.accumulate(iv, gv);
  });
}

Var fence_spans(Var p, const std::vector<std::pair<int, int>>& spans) {
  const Matrix& pv = p.value();
  check(pv.cols() % 2 == 0, "fence_spans", "odd feature width");
  const Eigen::Index half = pv.cols() / 2;
  const int n = static_cast<int>(pv.rows()) - 2;
  Matrix out(static_cast<Eigen::Index>(spans.size()), pv.cols());
  for (size_t s = 0; s < spans.size(); ++s) {
    const auto [i, j] = spans[s];
    check(i >= 0 && j >= i && j < n, "fence_spans", "span outside sentence");
    const auto r = static_cast<Eigen::Index>(s);
    out.row(r).head(half) = pv.row(j + 1).head(half) - pv.row(i).head(half);
    out.row(r).tail(half) = pv.row(i + 1).tail(half) - pv.row(j + 2).tail(half);
  }
  const int ip = p.id;
  return p.tape->record(std::move(out), [ip, spans, half](Tape& t, const Matrix& g) {
    t.accumulate_with(ip, [&](Matrix& gp) {
      for (size_t s = 0; s < spans.size(); ++s) {
        const auto [i, j] = spans[s];
        const auto r = static_cast<Eigen::Index>(s);
        gp.row(j + 1).head(half) += g.row(r).head(half);
        gp.row(i).head(half) -= g.row(r).head(half);
        gp.row(i + 1).tail(half) += g.row(r).tail(half);
        gp.row(j + 2).tail(half) -= g.row(r).tail(half);
      }
    });
  });
}

Var pair_block_dot(Var left, Var right,
                   const std::vector<std::pair<int, int>>& pairs, int labels) {
  Tape& t = same_tape(left, right);
  const Eigen::Index w = right.cols();
  check(left.cols() == w * labels, "pair_block_dot",
        "left has " + std::to_string(left.cols()) + " columns, expected " +
            std::to_string(w * labels));
  Matrix out(static_cast<Eigen::Index>(pairs.size()), labels);
  const Matrix& lv = left.value();
  const Matrix& rv = right.value();
  for (size_t k = 0; k < pairs.size(); ++k) {
    const auto [a, b] = pairs[k];
    check(a >= 0 && a < lv.rows() && b >= 0 && b < rv.rows(), "pair_block_dot",
          "pair index out of range");
    for (int r = 0; r < labels; ++r)
      out(static_cast<Eigen::Index>(k), r) =
          lv.row(a).segment(r * w, w).dot(rv.row(b));
  }
  const int il = left.id, ir = right.id;
  return t.record(std::move(out), [il, ir, pairs, labels, w](Tape& t, const Matrix& g) {
    const Matrix& lv = t.value(il);
    const Matrix& rv = t.value(ir);
    Matrix gl = Matrix::Zero(lv.rows(), lv.cols());
    Matrix gr = Matrix::Zero(rv.rows(), rv.cols());
    for (size_t k = 0; k < pairs.size(); ++k) {
      const auto [a, b] = pairs[k];
      for (int r = 0; r < labels; ++r) {
        const double gk = g(static_cast<Eigen::Index>(k), r);
        if (gk == 0.0) continue;
        gl.row(a).segment(r * w, w) += gk * rv.row(b);
        gr.row(b) += gk * lv.row(a).segment(r * w, w);
      }
    }
    t.accumulate(il, gl);
    t.accumulate(ir, gr);
  });
}

Var softmax_cross_entropy(Var logits, const std::vector<int>& targets,
                          double scale) {
  const Matrix& z = logits.value();
  check(static_cast<Eigen::Index>(targets.size()) == z.rows(),
        "softmax_cross_entropy", "target count");
  Matrix probs(z.rows(), z.cols());
  double loss = 0.0;
  for (Eigen::Index r = 0; r < z.rows(); ++r) {
    const int tgt = targets[static_cast<size_t>(r)];
    check(tgt >= 0 && tgt < z.cols(), "softmax_cross_entropy", "target out of range");
    const double mx = z.row(r).maxCoeff();
    probs.row(r) = (z.row(r).array() - mx).exp();
    const double total = probs.row(r).sum();
    probs.row(r) /= total;
    loss += -(z(r, tgt) - mx - std::log(total));
  }
  Matrix out(1, 1);
  out(0, 0) = scale * loss;
  const int il = logits.id;
  return logits.tape->record(std::move(out), [il, probs, targets, scale](Tape& t, const Matrix& g) {
    Matrix d = probs;
    for (size_t r = 0; r < targets.size(); ++r)
      d(static_cast<Eigen::Index>(r), targets[r]) -= 1.0;
    t.accumulate_with(il, [&](Matrix& gl) { gl += d * (scale * g(0, 0)); });
  });
}

Var sigmoid_cross_entropy(Var logits, const std::vector<double>& targets,
                          const std::vector<double>& weights, double scale) {
  const Matrix& z = logits.value();
  check(z.cols() == 1, "sigmoid_cross_entropy", "expects a column of logits");
  check(static_cast<Eigen::Index>(targets.size()) == z.rows() &&
            static_cast<Eigen::Index>(weights.size()) == z.rows(),
        "sigmoid_cross_entropy", "target/weight count");
  double loss = 0.0;
  Matrix d(z.rows(), 1);
  for (Eigen::Index r = 0; r < z.rows(); ++r) {
    const double x = z(r, 0);
    const double y = targets[static_cast<size_t>(r)];
    const double w = weights[static_cast<size_t>(r)];
    loss += w * (std::max(x, 0.0) - x * y + std::log1p(std::exp(-std::fabs(x))));
    const double sig = x >= 0 ? 1.0 / (1.0 + std::exp(-x))
                              : std::exp(x) / (1.0 + std::exp(x));
    d(r, 0) = w * (sig - y);
  }
  Matrix out(1, 1);
  out(0, 0) = scale * loss;
  const int il = logits.id;
  return logits.tape->record(std::move(out), [il, d, scale](Tape& t, const Matrix& g) {
    t.accumulate_with(il, [&](Matrix& gl) { gl += d * (scale * g(0, 0)); });
  });
}

Var pick_sum(Var x, const std::vector<std::tuple<int, int, double>>& entries) {
  const Matrix& v = x.value();
  double total = 0.0;
  for (const auto& [r, c, coef] : entries) {
    check(r >= 0 && r < v.rows() && c >= 0 && c < v.cols(), "pick_sum",
          "entry out of range");
    total += coef * v(r, c);
  }
  Matrix out(1, 1);
  out(0, 0) = total;
  const int ix = x.id;
  return x.tape->record(std::move(out), [ix, entries](Tape& t, const Matrix& g) {
    t.accumulate_with(ix, [&](Matrix& gx) {
      for (const auto& [r, c, coef] : entries) gx(r, c) += coef * g(0, 0);
    });
  });
}

Var combine(const std::vector<Var>& scalars, const std::vector<double>& coefs,
            double offset) {
  check(!scalars.empty() && scalars.size() == coefs.size(), "combine",
        "needs one coefficient per input");
  Tape& t = *scalars[0].tape;
  double total = offset;
  std::vector<int> ids;
  for (size_t i = 0; i < scalars.size(); ++i) {
    check(scalars[i].tape == &t && scalars[i].rows() == 1 && scalars[i].cols() == 1,
          "combine", "inputs must be 1x1 on one tape");
    total += coefs[i] * scalars[i].scalar();
    ids.push_back(scalars[i].id);
  }
  Matrix out(1, 1);
  out(0, 0) = total;
  return t.record(std::move(out), [ids, coefs](Tape& t, const Matrix& g) {
    for (size_t i = 0; i < ids.size(); ++i) {
      Matrix gi(1, 1);
      gi(0, 0) = coefs[i] * g(0, 0);
      t.accumulate(ids[i], gi);
    }
  });
}

}  // namespace ops

}  // namespace lingmt
