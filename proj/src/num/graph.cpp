// Copyright 2026 The medtimeline Authors. All Rights Reserved.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "medtl/num/graph.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "medtl/error.hpp"
#include "medtl/rng.hpp"

namespace medtl::num {

namespace {

[[noreturn]] void shape_fail(const char* op, const Tensor& a, const Tensor& b) {
  throw ShapeError(std::string(op) + ": shape mismatch " + a.shape_str() + " vs " + b.shape_str());
}

void require_rank2(const char* op, const Tensor& a) {
  if (a.rank() != 2) throw ShapeError(std::string(op) + ": expected rank-2 tensor, got " + a.shape_str());
}

double sigmoid_scalar(double x) {
  if (x >= 0) return 1.0 / (1.0 + std::exp(-x));
  const double e = std::exp(x);
  return e / (1.0 + e);
}

}  // namespace

Tensor& Graph::grad_of(std::size_t id) {
  auto& n = nodes_[id];
  if (!n.grad) n.grad = std::make_unique<Tensor>(n.value.shape());
  return *n.grad;
}

Var Graph::push(Tensor value, BackwardFn fn) {
  nodes_.push_back(Node{std::move(value), nullptr, record_ ? std::move(fn) : BackwardFn{}});
  return Var{nodes_.size() - 1};
}

Var Graph::constant(Tensor t) { return push(std::move(t), {}); }

Var Graph::param(Parameter& p) {
  return push(p.value, [&p](Graph& g, std::size_t self) {
    const Tensor& gr = *g.nodes_[self].grad;
    if (!p.grad.same_shape(p.value)) p.zero_grad();
    for (std::size_t i = 0; i < gr.size(); ++i) p.grad[i] += gr[i];
  });
}

Var Graph::gather_rows(Parameter& p, std::span<const int> ids) {
  const std::size_t d = p.value.cols();
  const std::size_t n_rows = p.value.rows();
  Tensor out(ids.size(), d);
  for (std::size_t i = 0; i < ids.size(); ++i) {
    if (ids[i] < 0 || static_cast<std::size_t>(ids[i]) >= n_rows)
      throw RangeError("gather_rows: id " + std::to_string(ids[i]) + " outside " + p.name + " " +
                       p.value.shape_str());
    const auto src = p.value.row_span(static_cast<std::size_t>(ids[i]));
    std::copy(src.begin(), src.end(), out.row_span(i).begin());
  }
  std::vector<int> keep(ids.begin(), ids.end());
  return push(std::move(out), [&p, keep = std::move(keep)](Graph& g, std::size_t self) {
    const Tensor& gr = *g.nodes_[self].grad;
    if (!p.grad.same_shape(p.value)) p.zero_grad();
    for (std::size_t i = 0; i < keep.size(); ++i) {
      if (keep[i] == 0 && p.freeze_row0) continue;
      auto dst = p.grad.row_span(static_cast<std::size_t>(keep[i]));
      const auto src = gr.row_span(i);
      for (std::size_t c = 0; c < dst.size(); ++c) dst[c] += src[c];
    }
  });
}

Var Graph::matmul(Var a, Var b) {
  const Tensor& A = value(a);
  const Tensor& B = value(b);
  require_rank2("matmul", A);
  require_rank2("matmul", B);
  if (A.cols() != B.rows()) shape_fail("matmul", A, B);
  const std::size_t m = A.rows(), k = A.cols(), n = B.cols();
  Tensor C(m, n);
  for (std::size_t i = 0; i < m; ++i) {
    for (std::size_t p = 0; p < k; ++p) {
      const double aip = A(i, p);
      if (aip == 0.0) continue;
      for (std::size_t j = 0; j < n; ++j) C(i, j) += aip * B(p, j);
    }
  }
  return push(std::move(C), [a, b, m, k, n](Graph& g, std::size_t self) {
    const Tensor& G = *g.nodes_[self].grad;
    const Tensor& A = g.value(a);
    const Tensor& B = g.value(b);
    Tensor& dA = g.grad_of(a.id);
    for (std::size_t i = 0; i < m; ++i) {
      for (std::size_t p = 0; p < k; ++p) {
        double s = 0.0;
        for (std::size_t j = 0; j < n; ++j) s += G(i, j) * B(p, j);
        dA(i, p) += s;
      }
    }
    Tensor& dB = g.grad_of(b.id);
    for (std::size_t i = 0; i < m; ++i) {
      for (std::size_t p = 0; p < k; ++p) {
        const double aip = A(i, p);
        if (aip == 0.0) continue;
        for (std::size_t j = 0; j < n; ++j) dB(p, j) += aip * G(i, j);
      }
    }
  });
}

Var Graph::add(Var a, Var b) {
  const Tensor& A = value(a);
  const Tensor& B = value(b);
  if (!A.same_shape(B)) shape_fail("add", A, B);
  Tensor C = A;
  for (std::size_t i = 0; i < C.size(); ++i) C[i] += B[i];
  return push(std::move(C), [a, b](Graph& g, std::size_t self) {
    const Tensor& G = *g.nodes_[self].grad;
    for (auto id : {a.id, b.id}) {
      Tensor& d = g.grad_of(id);
      for (std::size_t i = 0; i < G.size(); ++i) d[i] += G[i];
    }
  });
}

Var Graph::add_row(Var m, Var row) {
  const Tensor& M = value(m);
  const Tensor& R = value(row);
  if (R.rows() != 1 || R.cols() != M.cols()) shape_fail("add_row", M, R);
  Tensor C = M;
  for (std::size_t i = 0; i < C.rows(); ++i)
    for (std::size_t j = 0; j < C.cols(); ++j) C(i, j) += R[j];
  return push(std::move(C), [m, row](Graph& g, std::size_t self) {
    const Tensor& G = *g.nodes_[self].grad;
    Tensor& dm = g.grad_of(m.id);
    for (std::size_t i = 0; i < G.size(); ++i) dm[i] += G[i];
    Tensor& dr = g.grad_of(row.id);
    for (std::size_t i = 0; i < G.rows(); ++i)
      for (std::size_t j = 0; j < G.cols(); ++j) dr[j] += G(i, j);
  });
}

Var Graph::sub(Var a, Var b) {
  const Tensor& A = value(a);
  const Tensor& B = value(b);
  if (!A.same_shape(B)) shape_fail("sub", A, B);
  Tensor C = A;
  for (std::size_t i = 0; i < C.size(); ++i) C[i] -= B[i];
  return push(std::move(C), [a, b](Graph& g, std::size_t self) {
    const Tensor& G = *g.nodes_[self].grad;
    Tensor& da = g.grad_of(a.id);
    for (std::size_t i = 0; i < G.size(); ++i) da[i] += G[i];
    Tensor& db = g.grad_of(b.id);
    for (std::size_t i = 0; i < G.size(); ++i) db[i] -= G[i];
  });
}

Var Graph::mul(Var a, Var b) {
  const Tensor& A = value(a);
  const Tensor& B = value(b);
  if (!A.same_shape(B)) shape_fail("mul", A, B);
  Tensor C = A;
  for (std::size_t i = 0; i < C.size(); ++i) C[i] *= B[i];
  return push(std::move(C), [a, b](Graph& g, std::size_t self) {
    const Tensor& G = *g.nodes_[self].grad;
    const Tensor& A = g.value(a);
    const Tensor& B = g.value(b);
    Tensor& da = g.grad_of(a.id);
    for (std::size_t i = 0; i < G.size(); ++i) da[i] += G[i] * B[i];
    Tensor& db = g.grad_of(b.id);
    for (std::size_t i = 0; i < G.size(); ++i) db[i] += G[i] * A[i];
  });
}

Var Graph::scale(Var a, double s) {
  Tensor C = value(a);
  for (auto& x : C.data()) x *= s;
  return push(std::move(C), [a, s](Graph& g, std::size_t self) {
    const Tensor& G = *g.nodes_[self].grad;
    Tensor& da = g.grad_of(a.id);
    for (std::size_t i = 0; i < G.size(); ++i) da[i] += s * G[i];
  });
}

Var Graph::add_const(Var a, const Tensor& c) {
  const Tensor& A = value(a);
  if (!A.same_shape(c)) shape_fail("add_const", A, c);
  Tensor C = A;
  for (std::size_t i = 0; i < C.size(); ++i) C[i] += c[i];
  return push(std::move(C), [a](Graph& g, std::size_t self) {
    const Tensor& G = *g.nodes_[self].grad;
    Tensor& da = g.grad_of(a.id);
    for (std::size_t i = 0; i < G.size(); ++i) da[i] += G[i];
  });
}

Var Graph::tanh(Var a) {
  Tensor C = value(a);
  for (auto& x : C.data()) x = std::tanh(x);
  return push(std::move(C), [a](Graph& g, std::size_t self) {
    const Tensor& G = *g.nodes_[self].grad;
    const Tensor& Y = g.nodes_[self].value;
    Tensor& da = g.grad_of(a.id);
    for (std::size_t i = 0; i < G.size(); ++i) da[i] += G[i] * (1.0 - Y[i] * Y[i]);
  });
}

Var Graph::sigmoid(Var a) {
  Tensor C = value(a);
  for (auto& x : C.data()) x = sigmoid_scalar(x);
  return push(std::move(C), [a](Graph& g, std::size_t self) {
    const Tensor& G = *g.nodes_[self].grad;
    const Tensor& Y = g.nodes_[self].value;
    Tensor& da = g.grad_of(a.id);
    for (std::size_t i = 0; i < G.size(); ++i) da[i] += G[i] * Y[i] * (1.0 - Y[i]);
  });
}

Var Graph::relu(Var a) {
  Tensor C = value(a);
  for (auto& x : C.data()) x = x > 0 ? x : 0.0;
  return push(std::move(C), [a](Graph& g, std::size_t self) {
    const Tensor& G = *g.nodes_[self].grad;
    const Tensor& Y = g.nodes_[self].value;
    Tensor& da = g.grad_of(a.id);
    for (std::size_t i = 0; i < G.size(); ++i) da[i] += Y[i] > 0 ? G[i] : 0.0;
  });
}

Var Graph::concat_cols(std::span<const Var> parts) {
  if (parts.empty()) throw ShapeError("concat_cols: no inputs");
  const std::size_t r = value(parts[0]).rows();
  std::size_t total = 0;
  for (auto v : parts) {
    if (value(v).rows() != r) shape_fail("concat_cols", value(parts[0]), value(v));
    total += value(v).cols();
  }
  Tensor C(r, total);
  std::size_t off = 0;
  for (auto v : parts) {
    const Tensor& P = value(v);
    for (std::size_t i = 0; i < r; ++i)
      for (std::size_t j = 0; j < P.cols(); ++j) C(i, off + j) = P(i, j);
    off += P.cols();
  }
  std::vector<Var> ins(parts.begin(), parts.end());
  return push(std::move(C), [ins](Graph& g, std::size_t self) {
    const Tensor& G = *g.nodes_[self].grad;
    std::size_t off = 0;
    for (auto v : ins) {
      const std::size_t c = g.value(v).cols();
      Tensor& d = g.grad_of(v.id);
      for (std::size_t i = 0; i < G.rows(); ++i)
        for (std::size_t j = 0; j < c; ++j) d(i, j) += G(i, off + j);
      off += c;
    }
  });
}

Var Graph::concat_rows(std::span<const Var> parts) {
  if (parts.empty()) throw ShapeError("concat_rows: no inputs");
  const std::size_t c = value(parts[0]).cols();
  std::size_t total = 0;
  for (auto v : parts) {
    if (value(v).cols() != c) shape_fail("concat_rows", value(parts[0]), value(v));
    total += value(v).rows();
  }
  Tensor C(total, c);
  std::size_t off = 0;
  for (auto v : parts) {
    const Tensor& P = value(v);
    std::copy(P.data().begin(), P.data().end(), C.data().begin() + static_cast<std::ptrdiff_t>(off * c));
    off += P.rows();
  }
  std::vector<Var> ins(parts.begin(), parts.end());
  return push(std::move(C), [ins, c](Graph& g, std::size_t self) {
    const Tensor& G = *g.nodes_[self].grad;
    std::size_t off = 0;
    for (auto v : ins) {
      Tensor& d = g.grad_of(v.id);
      for (std::size_t i = 0; i < d.size(); ++i) d[i] += G[off * c + i];
      off += g.value(v).rows();
    }
  });
}

Var Graph::slice_cols(Var a, std::size_t begin, std::size_t count) {
  const Tensor& A = value(a);
  if (begin + count > A.cols())
    throw ShapeError("slice_cols: [" + std::to_string(begin) + "," + std::to_string(begin + count) +
                     ") outside " + A.shape_str());
  Tensor C(A.rows(), count);
  for (std::size_t i = 0; i < A.rows(); ++i)
    for (std::size_t j = 0; j < count; ++j) C(i, j) = A(i, begin + j);
  return push(std::move(C), [a, begin, count](Graph& g, std::size_t self) {
    const Tensor& G = *g.nodes_[self].grad;
    Tensor& d = g.grad_of(a.id);
    for (std::size_t i = 0; i < G.rows(); ++i)
      for (std::size_t j = 0; j < count; ++j) d(i, begin + j) += G(i, j);
  });
}

Var Graph::slice_rows(Var a, std::size_t begin, std::size_t count) {
  const Tensor& A = value(a);
  if (begin + count > A.rows())
    throw ShapeError("slice_rows: [" + std::to_string(begin) + "," + std::to_string(begin + count) +
                     ") outside " + A.shape_str());
  const std::size_t c = A.cols();
  Tensor C(count, c);
  std::copy(A.data().begin() + static_cast<std::ptrdiff_t>(begin * c),
            A.data().begin() + static_cast<std::ptrdiff_t>((begin + count) * c), C.data().begin());
  return push(std::move(C), [a, begin, c](Graph& g, std::size_t self) {
    const Tensor& G = *g.nodes_[self].grad;
    Tensor& d = g.grad_of(a.id);
    for (std::size_t i = 0; i < G.size(); ++i) d[begin * c + i] += G[i];
  });
}

Var Graph::transpose(Var a) {
  const Tensor& A = value(a);
  require_rank2("transpose", A);
  Tensor C(A.cols(), A.rows());
  for (std::size_t i = 0; i < A.rows(); ++i)
    for (std::size_t j = 0; j < A.cols(); ++j) C(j, i) = A(i, j);
  return push(std::move(C), [a](Graph& g, std::size_t self) {
    const Tensor& G = *g.nodes_[self].grad;
    Tensor& d = g.grad_of(a.id);
    for (std::size_t i = 0; i < G.rows(); ++i)
      for (std::size_t j = 0; j < G.cols(); ++j) d(j, i) += G(i, j);
  });
}

Var Graph::sum(Var a) {
  double s = 0.0;
  for (double x : value(a).data()) s += x;
  return push(Tensor(1, 1, s), [a](Graph& g, std::size_t self) {
    const double gs = (*g.nodes_[self].grad)[0];
    Tensor& d = g.grad_of(a.id);
    for (auto& x : d.data()) x += gs;
  });
}

Var Graph::max_rows(Var a) {
  const Tensor& A = value(a);
  if (A.rows() == 0) throw ShapeError("max_rows: empty input " + A.shape_str());
  Tensor C(1, A.cols());
  std::vector<std::size_t> arg(A.cols(), 0);
  for (std::size_t j = 0; j < A.cols(); ++j) {
    double best = A(0, j);
    for (std::size_t i = 1; i < A.rows(); ++i) {
      if (A(i, j) > best) {
        best = A(i, j);
        arg[j] = i;
      }
    }
    C[j] = best;
  }
  return push(std::move(C), [a, arg = std::move(arg)](Graph& g, std::size_t self) {
    const Tensor& G = *g.nodes_[self].grad;
    Tensor& d = g.grad_of(a.id);
    for (std::size_t j = 0; j < arg.size(); ++j) d(arg[j], j) += G[j];
  });
}

Var Graph::softmax_rows(Var a) {
  const Tensor& A = value(a);
  Tensor Y(A.rows(), A.cols());
  for (std::size_t i = 0; i < A.rows(); ++i) {
    const auto p = softmax(A.row_span(i));
    std::copy(p.begin(), p.end(), Y.row_span(i).begin());
  }
  return push(std::move(Y), [a](Graph& g, std::size_t self) {
    const Tensor& G = *g.nodes_[self].grad;
    const Tensor& Y = g.nodes_[self].value;
    Tensor& d = g.grad_of(a.id);
    for (std::size_t i = 0; i < Y.rows(); ++i) {
      double dot = 0.0;
      for (std::size_t j = 0; j < Y.cols(); ++j) dot += G(i, j) * Y(i, j);
      for (std::size_t j = 0; j < Y.cols(); ++j) d(i, j) += Y(i, j) * (G(i, j) - dot);
    }
  });
}

Var Graph::log_softmax_rows(Var a) {
  const Tensor& A = value(a);
  Tensor Y(A.rows(), A.cols());
  for (std::size_t i = 0; i < A.rows(); ++i) {
    const double lse = log_sum_exp(A.row_span(i));
    for (std::size_t j = 0; j < A.cols(); ++j) Y(i, j) = A(i, j) - lse;
  }
  return push(std::move(Y), [a](Graph& g, std::size_t self) {
    const Tensor& G = *g.nodes_[self].grad;
    const Tensor& Y = g.nodes_[self].value;
    Tensor& d = g.grad_of(a.id);
    for (std::size_t i = 0; i < Y.rows(); ++i) {
      double gs = 0.0;
      for (std::size_t j = 0; j < Y.cols(); ++j) gs += G(i, j);
      for (std::size_t j = 0; j < Y.cols(); ++j) d(i, j) += G(i, j) - std::exp(Y(i, j)) * gs;
    }
  });
}

Var Graph::pick_nll(Var log_probs, std::span<const int> targets) {
  const Tensor& A = value(log_probs);
  if (targets.size() != A.rows())
    throw ShapeError("pick_nll: " + std::to_string(targets.size()) + " targets for " + A.shape_str());
  double s = 0.0;
  for (std::size_t t = 0; t < targets.size(); ++t) {
    if (targets[t] < 0) continue;
    if (static_cast<std::size_t>(targets[t]) >= A.cols())
      throw RangeError("pick_nll: target " + std::to_string(targets[t]) + " outside " + A.shape_str());
    s -= A(t, static_cast<std::size_t>(targets[t]));
  }
  std::vector<int> tg(targets.begin(), targets.end());
  return push(Tensor(1, 1, s), [log_probs, tg = std::move(tg)](Graph& g, std::size_t self) {
    const double gs = (*g.nodes_[self].grad)[0];
    Tensor& d = g.grad_of(log_probs.id);
    for (std::size_t t = 0; t < tg.size(); ++t) {
      if (tg[t] >= 0) d(t, static_cast<std::size_t>(tg[t])) -= gs;
    }
  });
}

Var Graph::dropout(Var a, double p, bool training, Rng& rng) {
  if (!training || p <= 0.0) return a;
  if (p >= 1.0) throw std::invalid_argument("dropout: p must be < 1");
  const Tensor& A = value(a);
  Tensor mask(A.shape());
  const double keep = 1.0 / (1.0 - p);
  for (auto& m : mask.data()) m = rng.uniform() >= p ? keep : 0.0;
  return mask_mul(a, mask);
}

Var Graph::mask_mul(Var a, const Tensor& mask) {
  const Tensor& A = value(a);
  if (!A.same_shape(mask)) shape_fail("mask_mul", A, mask);
  Tensor C = A;
  for (std::size_t i = 0; i < C.size(); ++i) C[i] *= mask[i];
  return push(std::move(C), [a, mask](Graph& g, std::size_t self) {
    const Tensor& G = *g.nodes_[self].grad;
    Tensor& d = g.grad_of(a.id);
    for (std::size_t i = 0; i < G.size(); ++i) d[i] += G[i] * mask[i];
  });
}

Var Graph::layer_norm_rows(Var x, Var gamma, Var beta, double eps) {
  const Tensor& X = value(x);
  const std::size_t r = X.rows(), c = X.cols();
  if (value(gamma).size() != c || value(beta).size() != c)
    shape_fail("layer_norm_rows", X, value(gamma));
  Tensor xhat(r, c);
  std::vector<double> inv_std(r);
  for (std::size_t i = 0; i < r; ++i) {
    double mu = 0.0;
    for (std::size_t j = 0; j < c; ++j) mu += X(i, j);
    mu /= static_cast<double>(c);
    double var = 0.0;
    for (std::size_t j = 0; j < c; ++j) var += (X(i, j) - mu) * (X(i, j) - mu);
    var /= static_cast<double>(c);
    inv_std[i] = 1.0 / std::sqrt(var + eps);
    for (std::size_t j = 0; j < c; ++j) xhat(i, j) = (X(i, j) - mu) * inv_std[i];
  }
  const Tensor& Gm = value(gamma);
  const Tensor& Bt = value(beta);
  Tensor Y(r, c);
  for (std::size_t i = 0; i < r; ++i)
    for (std::size_t j = 0; j < c; ++j) Y(i, j) = Gm[j] * xhat(i, j) + Bt[j];
  return push(std::move(Y), [x, gamma, beta, xhat = std::move(xhat), inv_std = std::move(inv_std)](
                                Graph& g, std::size_t self) {
    const Tensor& G = *g.nodes_[self].grad;
    const Tensor& Gm = g.value(gamma);
    const std::size_t r = G.rows(), c = G.cols();
    Tensor& dg = g.grad_of(gamma.id);
    Tensor& db = g.grad_of(beta.id);
    Tensor& dx = g.grad_of(x.id);
    std::vector<double> dxhat(c);
    for (std::size_t i = 0; i < r; ++i) {
      double mean_d = 0.0, mean_dx = 0.0;
      for (std::size_t j = 0; j < c; ++j) {
        dg[j] += G(i, j) * xhat(i, j);
        db[j] += G(i, j);
        dxhat[j] = G(i, j) * Gm[j];
        mean_d += dxhat[j];
        mean_dx += dxhat[j] * xhat(i, j);
      }
      mean_d /= static_cast<double>(c);
      mean_dx /= static_cast<double>(c);
      for (std::size_t j = 0; j < c; ++j)
        dx(i, j) += inv_std[i] * (dxhat[j] - mean_d - xhat(i, j) * mean_dx);
    }
  });
}

Var Graph::window_stack(Var x, std::size_t width) {
  if (width == 0) throw ShapeError("window_stack: width must be >= 1");
  const Tensor& X = value(x);
  const std::size_t L = X.rows(), d = X.cols();
  const std::ptrdiff_t left = static_cast<std::ptrdiff_t>((width - 1) / 2);
  Tensor C(L, width * d);
  for (std::size_t t = 0; t < L; ++t) {
    for (std::size_t k = 0; k < width; ++k) {
      const std::ptrdiff_t src = static_cast<std::ptrdiff_t>(t) - left + static_cast<std::ptrdiff_t>(k);
      if (src < 0 || src >= static_cast<std::ptrdiff_t>(L)) continue;
      for (std::size_t c = 0; c < d; ++c) C(t, k * d + c) = X(static_cast<std::size_t>(src), c);
    }
  }
  return push(std::move(C), [x, width, left, L, d](Graph& g, std::size_t self) {
    const Tensor& G = *g.nodes_[self].grad;
    Tensor& dx = g.grad_of(x.id);
    for (std::size_t t = 0; t < L; ++t) {
      for (std::size_t k = 0; k < width; ++k) {
        const std::ptrdiff_t src = static_cast<std::ptrdiff_t>(t) - left + static_cast<std::ptrdiff_t>(k);
        if (src < 0 || src >= static_cast<std::ptrdiff_t>(L)) continue;
        for (std::size_t c = 0; c < d; ++c) dx(static_cast<std::size_t>(src), c) += G(t, k * d + c);
      }
    }
  });
}

Var Graph::custom(Tensor value, BackwardFn backward) { return push(std::move(value), std::move(backward)); }

void Graph::backward(Var loss) {
  const Tensor& L = value(loss);
  if (L.size() != 1) throw ShapeError("backward: loss must be 1x1, got " + L.shape_str());
  if (!record_) throw std::logic_error("backward on a graph built without gradient recording");
  grad_of(loss.id)[0] += 1.0;
  for (std::size_t i = loss.id + 1; i-- > 0;) {
    auto& n = nodes_[i];
    if (n.grad && n.backward) n.backward(*this, i);
  }
}

double log_sum_exp(std::span<const double> v) {
  if (v.empty()) throw std::invalid_argument("log_sum_exp of an empty vector");
  const double m = *std::max_element(v.begin(), v.end());
  if (m == -std::numeric_limits<double>::infinity()) return m;
  if (std::isinf(m)) return m;
  double s = 0.0;
  for (double x : v) s += std::exp(x - m);
  return m + std::log(s);
}

std::vector<double> softmax(std::span<const double> v) {
  std::vector<double> out(v.size());
  if (v.empty()) return out;
  const double m = *std::max_element(v.begin(), v.end());
  double s = 0.0;
  for (std::size_t i = 0; i < v.size(); ++i) {
    out[i] = std::exp(v[i] - m);
    s += out[i];
  }
  for (auto& x : out) x /= s;
  return out;
}

}  // namespace medtl::num
