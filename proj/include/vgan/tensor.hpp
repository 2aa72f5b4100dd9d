#pragma once

#include <functional>
#include <vector>

namespace vgan::net {

// Dense row-major 2-D tensor of doubles. Vectors are 1-row tensors.
struct Tensor {
  int rows = 0;
  int cols = 0;
  std::vector<double> data;

  Tensor() = default;
  Tensor(int r, int c) : rows(r), cols(c), data(static_cast<std::size_t>(r) * c, 0.0) {}

  static Tensor zeros(int r, int c) { return Tensor(r, c); }

  double& at(int r, int c) { return data[static_cast<std::size_t>(r) * cols + c]; }
  double at(int r, int c) const { return data[static_cast<std::size_t>(r) * cols + c]; }
  std::size_t size() const { return data.size(); }
  bool same_shape(const Tensor& o) const { return rows == o.rows && cols == o.cols; }
};

// C += op_a(A) * op_b(B) with optional transposes.
void matmul_accum(const Tensor& a, bool ta, const Tensor& b, bool tb, Tensor* c);
Tensor matmul(const Tensor& a, bool ta, const Tensor& b, bool tb);

// Reverse-mode tape over whole tensors. Nodes are created in forward
// (topological) order; backward() walks them in reverse with a fixed
// accumulation order, so gradients are reproducible bit for bit.
class Tape {
 public:
  using Id = int;

  Id leaf(Tensor value);

  Id matmul(Id a, Id b, bool transpose_a = false, bool transpose_b = false);
  Id add(Id a, Id b);                  // same shape
  Id sub(Id a, Id b);                  // same shape
  Id add_row_broadcast(Id m, Id row);  // row added to every row of m
  Id relu(Id a);
  Id leaky_relu(Id a, double slope);
  Id softmax_rows(Id a);
  Id concat_cols(const std::vector<Id>& parts);  // equal row counts
  Id reshape(Id a, int rows, int cols);
  Id pad_cols(Id a, int new_cols);  // append zero columns
  Id slice_cols(Id a, int first, int count);
  // col: n x 1, row: m x 1 -> n x m with out[i][j] = col[i] + row[j].
  Id add_outer(Id col, Id row);
  Id scale(Id a, double s);
  Id square(Id a);
  Id mean_all(Id a);  // 1x1

  const Tensor& value(Id id) const { return nodes_[id].value; }
  const Tensor& grad(Id id) const { return nodes_[id].grad; }

  // Seeds d(root)/d(root) = 1 (root must be 1x1) and propagates.
  void backward(Id root);

 private:
  struct Node {
    Tensor value;
    Tensor grad;
    std::function<void(Tape&, const Node&)> backprop;  // null for leaves
  };

  Id push(Tensor value, std::function<void(Tape&, const Node&)> backprop);
  Tensor& grad_ref(Id id) { return nodes_[id].grad; }

  std::vector<Node> nodes_;
};

}  // namespace vgan::net
