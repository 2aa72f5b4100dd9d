#include "vgan/tensor.hpp"

#include <cmath>

#include "vgan/errors.hpp"

namespace vgan::net {

void matmul_accum(const Tensor& a, bool ta, const Tensor& b, bool tb, Tensor* c) {
  const int m = ta ? a.cols : a.rows;
  const int k = ta ? a.rows : a.cols;
  const int kb = tb ? b.cols : b.rows;
  const int n = tb ? b.rows : b.cols;
  if (k != kb)
    fail(Errc::numeric, "matmul: inner dimensions " + std::to_string(k) + " and " +
                            std::to_string(kb) + " do not match");
  if (c->rows != m || c->cols != n) *c = Tensor(m, n);

  // i-k-j loop order keeps the inner loop contiguous for the common
  // non-transposed case.
  for (int i = 0; i < m; ++i) {
    double* crow = c->data.data() + static_cast<std::size_t>(i) * n;
    for (int kk = 0; kk < k; ++kk) {
      const double av = ta ? a.at(kk, i) : a.at(i, kk);
      if (av == 0.0) continue;
      if (!tb) {
        const double* brow = b.data.data() + static_cast<std::size_t>(kk) * b.cols;
        for (int j = 0; j < n; ++j) crow[j] += av * brow[j];
      } else {
        for (int j = 0; j < n; ++j) crow[j] += av * b.at(j, kk);
      }
    }
  }
}

Tensor matmul(const Tensor& a, bool ta, const Tensor& b, bool tb) {
  Tensor c(ta ? a.cols : a.rows, tb ? b.rows : b.cols);
  matmul_accum(a, ta, b, tb, &c);
  return c;
}

Tape::Id Tape::push(Tensor value, std::function<void(Tape&, const Node&)> backprop) {
  Node node;
  node.grad = Tensor(value.rows, value.cols);
  node.value = std::move(value);
  node.backprop = std::move(backprop);
  nodes_.push_back(std::move(node));
  return static_cast<Id>(nodes_.size()) - 1;
}

Tape::Id Tape::leaf(Tensor value) { return push(std::move(value), nullptr); }

Tape::Id Tape::matmul(Id a, Id b, bool ta, bool tb) {
  Tensor out = net::matmul(value(a), ta, value(b), tb);
  return push(std::move(out), [a, b, ta, tb](Tape& t, const Node& n) {
    // C = opA(A) * opB(B)
    if (!ta) {
      matmul_accum(n.grad, false, t.value(b), !tb, &t.grad_ref(a));
    } else {
      matmul_accum(t.value(b), tb, n.grad, true, &t.grad_ref(a));
    }
    if (!tb) {
      matmul_accum(t.value(a), !ta, n.grad, false, &t.grad_ref(b));
    } else {
      matmul_accum(n.grad, true, t.value(a), ta, &t.grad_ref(b));
    }
  });
}

Tape::Id Tape::add(Id a, Id b) {
  if (!value(a).same_shape(value(b))) fail(Errc::numeric, "add: shape mismatch");
  Tensor out = value(a);
  for (std::size_t i = 0; i < out.size(); ++i) out.data[i] += value(b).data[i];
  return push(std::move(out), [a, b](Tape& t, const Node& n) {
    for (std::size_t i = 0; i < n.grad.size(); ++i) {
      t.grad_ref(a).data[i] += n.grad.data[i];
      t.grad_ref(b).data[i] += n.grad.data[i];
    }
  });
}

Tape::Id Tape::sub(Id a, Id b) {
  if (!value(a).same_shape(value(b))) fail(Errc::numeric, "sub: shape mismatch");
  Tensor out = value(a);
  for (std::size_t i = 0; i < out.size(); ++i) out.data[i] -= value(b).data[i];
  return push(std::move(out), [a, b](Tape& t, const Node& n) {
    for (std::size_t i = 0; i < n.grad.size(); ++i) {
      t.grad_ref(a).data[i] += n.grad.data[i];
      t.grad_ref(b).data[i] -= n.grad.data[i];
    }
  });
}

Tape::Id Tape::add_row_broadcast(Id m, Id row) {
  const Tensor& mm = value(m);
  const Tensor& rr = value(row);
  if (rr.rows != 1 || rr.cols != mm.cols)
    fail(Errc::numeric, "add_row_broadcast: row shape mismatch");
  Tensor out = mm;
  for (int i = 0; i < out.rows; ++i)
    for (int j = 0; j < out.cols; ++j) out.at(i, j) += rr.at(0, j);
  return push(std::move(out), [m, row](Tape& t, const Node& n) {
    for (std::size_t i = 0; i < n.grad.size(); ++i)
      t.grad_ref(m).data[i] += n.grad.data[i];
    Tensor& rg = t.grad_ref(row);
    for (int i = 0; i < n.grad.rows; ++i)
      for (int j = 0; j < n.grad.cols; ++j) rg.at(0, j) += n.grad.at(i, j);
  });
}

Tape::Id Tape::relu(Id a) {
  Tensor out = value(a);
  for (double& v : out.data) v = v > 0.0 ? v : 0.0;
  return push(std::move(out), [a](Tape& t, const Node& n) {
    const Tensor& x = t.value(a);
    for (std::size_t i = 0; i < n.grad.size(); ++i)
      if (x.data[i] > 0.0) t.grad_ref(a).data[i] += n.grad.data[i];
  });
}

Tape::Id Tape::leaky_relu(Id a, double slope) {
  Tensor out = value(a);
  for (double& v : out.data) v = v > 0.0 ? v : slope * v;
  return push(std::move(out), [a, slope](Tape& t, const Node& n) {
    const Tensor& x = t.value(a);
    for (std::size_t i = 0; i < n.grad.size(); ++i)
      t.grad_ref(a).data[i] += n.grad.data[i] * (x.data[i] > 0.0 ? 1.0 : slope);
  });
}

Tape::Id Tape::softmax_rows(Id a) {
  Tensor out = value(a);
  for (int i = 0; i < out.rows; ++i) {
    double mx = -1e300;
    for (int j = 0; j < out.cols; ++j) mx = std::max(mx, out.at(i, j));
    double sum = 0.0;
    for (int j = 0; j < out.cols; ++j) {
      out.at(i, j) = std::exp(out.at(i, j) - mx);
      sum += out.at(i, j);
    }
    for (int j = 0; j < out.cols; ++j) out.at(i, j) /= sum;
  }
  return push(std::move(out), [a](Tape& t, const Node& n) {
    const Tensor& y = n.value;
    for (int i = 0; i < y.rows; ++i) {
      double dot = 0.0;
      for (int j = 0; j < y.cols; ++j) dot += n.grad.at(i, j) * y.at(i, j);
      for (int j = 0; j < y.cols; ++j)
        t.grad_ref(a).at(i, j) += y.at(i, j) * (n.grad.at(i, j) - dot);
    }
  });
}

Tape::Id Tape::concat_cols(const std::vector<Id>& parts) {
  if (parts.empty()) fail(Errc::numeric, "concat_cols: empty part list");
  const int rows = value(parts[0]).rows;
  int cols = 0;
  for (Id p : parts) {
    if (value(p).rows != rows) fail(Errc::numeric, "concat_cols: row mismatch");
    cols += value(p).cols;
  }
  Tensor out(rows, cols);
  int offset = 0;
  for (Id p : parts) {
    const Tensor& v = value(p);
    for (int i = 0; i < rows; ++i)
      for (int j = 0; j < v.cols; ++j) out.at(i, offset + j) = v.at(i, j);
    offset += v.cols;
  }
  return push(std::move(out), [parts](Tape& t, const Node& n) {
    int offset = 0;
    for (Id p : parts) {
      Tensor& g = t.grad_ref(p);
      for (int i = 0; i < g.rows; ++i)
        for (int j = 0; j < g.cols; ++j) g.at(i, j) += n.grad.at(i, offset + j);
      offset += g.cols;
    }
  });
}

Tape::Id Tape::reshape(Id a, int rows, int cols) {
  const Tensor& v = value(a);
  if (static_cast<std::size_t>(rows) * cols != v.size())
    fail(Errc::numeric, "reshape: element count mismatch");
  Tensor out(rows, cols);
  out.data = v.data;
  return push(std::move(out), [a](Tape& t, const Node& n) {
    for (std::size_t i = 0; i < n.grad.size(); ++i)
      t.grad_ref(a).data[i] += n.grad.data[i];
  });
}

Tape::Id Tape::pad_cols(Id a, int new_cols) {
  const Tensor& v = value(a);
  if (new_cols < v.cols) fail(Errc::numeric, "pad_cols: target narrower than input");
  Tensor out(v.rows, new_cols);
  for (int i = 0; i < v.rows; ++i)
    for (int j = 0; j < v.cols; ++j) out.at(i, j) = v.at(i, j);
  return push(std::move(out), [a](Tape& t, const Node& n) {
    Tensor& g = t.grad_ref(a);
    for (int i = 0; i < g.rows; ++i)
      for (int j = 0; j < g.cols; ++j) g.at(i, j) += n.grad.at(i, j);
  });
}

Tape::Id Tape::slice_cols(Id a, int first, int count) {
  const Tensor& v = value(a);
  if (first < 0 || count <= 0 || first + count > v.cols)
    fail(Errc::numeric, "slice_cols: range outside tensor");
  Tensor out(v.rows, count);
  for (int i = 0; i < v.rows; ++i)
    for (int j = 0; j < count; ++j) out.at(i, j) = v.at(i, first + j);
  return push(std::move(out), [a, first](Tape& t, const Node& n) {
    Tensor& g = t.grad_ref(a);
    for (int i = 0; i < n.grad.rows; ++i)
      for (int j = 0; j < n.grad.cols; ++j) g.at(i, first + j) += n.grad.at(i, j);
  });
}

Tape::Id Tape::add_outer(Id col, Id row) {
  const Tensor& c = value(col);
  const Tensor& r = value(row);
  if (c.cols != 1 || r.cols != 1) fail(Errc::numeric, "add_outer: expects column vectors");
  Tensor out(c.rows, r.rows);
  for (int i = 0; i < c.rows; ++i)
    for (int j = 0; j < r.rows; ++j) out.at(i, j) = c.at(i, 0) + r.at(j, 0);
  return push(std::move(out), [col, row](Tape& t, const Node& n) {
    Tensor& gc = t.grad_ref(col);
    Tensor& gr = t.grad_ref(row);
    for (int i = 0; i < n.grad.rows; ++i)
      for (int j = 0; j < n.grad.cols; ++j) {
        gc.at(i, 0) += n.grad.at(i, j);
        gr.at(j, 0) += n.grad.at(i, j);
      }
  });
}

Tape::Id Tape::scale(Id a, double s) {
  Tensor out = value(a);
  for (double& v : out.data) v *= s;
  return push(std::move(out), [a, s](Tape& t, const Node& n) {
    for (std::size_t i = 0; i < n.grad.size(); ++i)
      t.grad_ref(a).data[i] += s * n.grad.data[i];
  });
}

Tape::Id Tape::square(Id a) {
  Tensor out = value(a);
  for (double& v : out.data) v *= v;
  return push(std::move(out), [a](Tape& t, const Node& n) {
    const Tensor& x = t.value(a);
    for (std::size_t i = 0; i < n.grad.size(); ++i)
      t.grad_ref(a).data[i] += 2.0 * x.data[i] * n.grad.data[i];
  });
}

Tape::Id Tape::mean_all(Id a) {
  const Tensor& v = value(a);
  Tensor out(1, 1);
  for (double x : v.data) out.data[0] += x;
  out.data[0] /= static_cast<double>(v.size());
  return push(std::move(out), [a](Tape& t, const Node& n) {
    const double g = n.grad.data[0] / static_cast<double>(t.value(a).size());
    for (std::size_t i = 0; i < t.grad_ref(a).size(); ++i)
      t.grad_ref(a).data[i] += g;
  });
}

void Tape::backward(Id root) {
  if (value(root).rows != 1 || value(root).cols != 1)
    fail(Errc::numeric, "backward: root must be a scalar");
  for (auto& node : nodes_) {
    std::fill(node.grad.data.begin(), node.grad.data.end(), 0.0);
  }
  nodes_[root].grad.data[0] = 1.0;
  for (Id id = root; id >= 0; --id) {
    const Node& node = nodes_[id];
    if (node.backprop) node.backprop(*this, node);
  }
}

}  // namespace vgan::net
