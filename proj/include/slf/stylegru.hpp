#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <vector>

#include "slf/ad.hpp"
#include "slf/common.hpp"
#include "slf/nn.hpp"
#include "slf/rng.hpp"
#include "slf/style_flow.hpp"

namespace slf::gru {

using Mat = Eigen::MatrixXd;

enum class Mode { kTrain, kEval };

// One GRU cell (one layer, one direction):
//   z = sigmoid(Wz x + Uz h + bz)
//   r = sigmoid(Wr x + Ur h + br)
//   hcand = tanh(Wh x + Uh (r . h) + bh)
//   h' = z . h + (1 - z) . hcand
// The reset gate multiplies the hidden state before the recurrent matrix.
template <typename Scalar>
struct GruCellT {
  using M = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;
  M wz, uz, wr, ur, wh, uh;  // (H x in), (H x H)
  M bz, br, bh;              // (H x 1)
};

template <typename Scalar>
struct GruStackT {
  using M = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;
  int input_dim = 0;
  int hidden = 0;
  int layers = 0;
  int directions = 2;
  std::vector<GruCellT<Scalar>> cells;  // index = layer * directions + dir

  const GruCellT<Scalar>& cell(int layer, int dir) const {
    return cells[static_cast<std::size_t>(layer * directions + dir)];
  }
  GruCellT<Scalar>& cell(int layer, int dir) {
    return cells[static_cast<std::size_t>(layer * directions + dir)];
  }

  int layer_input_dim(int layer) const {
    return layer == 0 ? input_dim : hidden * directions;
  }

  static GruStackT zeros(int input_dim, int hidden, int layers,
                         int directions) {
    GruStackT s;
    s.input_dim = input_dim;
    s.hidden = hidden;
    s.layers = layers;
    s.directions = directions;
    for (int layer = 0; layer < layers; ++layer) {
      for (int dir = 0; dir < directions; ++dir) {
        GruCellT<Scalar> c;
        int in = s.layer_input_dim(layer);
        c.wz = M::Zero(hidden, in);
        c.wr = M::Zero(hidden, in);
        c.wh = M::Zero(hidden, in);
        c.uz = M::Zero(hidden, hidden);
        c.ur = M::Zero(hidden, hidden);
        c.uh = M::Zero(hidden, hidden);
        c.bz = M::Zero(hidden, 1);
        c.br = M::Zero(hidden, 1);
        c.bh = M::Zero(hidden, 1);
        s.cells.push_back(std::move(c));
      }
    }
    return s;
  }
};

// Evaluation-mode forward over one sequence. Input is (input_dim x T);
// the result holds the final hidden state of every (layer, direction) as
// columns ordered layer * directions + dir.
template <typename Scalar>
Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic> encode_final_states(
    const GruStackT<Scalar>& stack,
    const Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>& input) {
  using M = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;
  using V = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;
  require(input.rows() == stack.input_dim, ErrorCode::kShapeError,
          "gru input feature dimension mismatch");
  require(input.cols() >= 1, ErrorCode::kShapeError, "gru needs >= 1 timestep");
  const int timesteps = static_cast<int>(input.cols());
  const int hidden = stack.hidden;

  M seq = input;
  M finals(hidden, stack.directions * stack.layers);
  for (int layer = 0; layer < stack.layers; ++layer) {
    M outputs(hidden * stack.directions, timesteps);
    for (int dir = 0; dir < stack.directions; ++dir) {
      const GruCellT<Scalar>& c = stack.cell(layer, dir);
      V h = V::Zero(hidden);
      for (int step = 0; step < timesteps; ++step) {
        int t = (dir == 0) ? step : (timesteps - 1 - step);
        V x = seq.col(t);
        V z = ((-(c.wz * x + c.uz * h + c.bz.col(0)).array()).exp() + Scalar(1))
                  .inverse()
                  .matrix();
        V r = ((-(c.wr * x + c.ur * h + c.br.col(0)).array()).exp() + Scalar(1))
                  .inverse()
                  .matrix();
        V hcand = (c.wh * x + c.uh * (r.cwiseProduct(h)) + c.bh.col(0))
                      .array()
                      .tanh()
                      .matrix();
        h = z.cwiseProduct(h) +
            (V::Ones(hidden) - z).cwiseProduct(hcand);
        outputs.block(dir * hidden, t, hidden, 1) = h;
      }
      finals.col(layer * stack.directions + dir) = h;
    }
    seq = std::move(outputs);
  }
  return finals;
}

// Final hidden-state tensor (C x B x L) stored as a C x (B*L) matrix with
// column index layer * B + dir. flatten() vectorizes column-major, i.e.
// element (c, dir, layer) lands at (layer * B + dir) * C + c.
struct StyleEmbedding {
  Mat hidden;
  int hidden_size = 0;
  int directions = 0;
  int layers = 0;

  Eigen::VectorXd flatten() const {
    return Eigen::Map<const Eigen::VectorXd>(hidden.data(), hidden.size());
  }
  int flattened_dim() const { return hidden_size * directions * layers; }
  bool all_finite() const { return hidden.allFinite(); }
};

// Auxiliary classifier: an input projection followed by a two-layer
// residual block and a scalar sigmoid head.
//   h1 = tanh(W1 x + b1)
//   h  = h1 + W3 tanh(W2 h1 + b2) + b3
//   p  = sigmoid(Wout h + bout)
struct AuxClassifier {
  Mat w1, b1, w2, b2, w3, b3, wout, bout;

  static AuxClassifier create(int input_dim, int hidden, Pcg32& rng);
  static AuxClassifier zeros(int input_dim, int hidden);

  int input_dim() const { return static_cast<int>(w1.cols()); }
  double logit(const Eigen::VectorXd& x) const;
};

struct StyleGruConfig {
  int input_dim = kLatentLevels * kLatentChannels;  // 9216
  int hidden = 4096;
  int layers = 2;
  int directions = 2;
  int aux_hidden = 4096;
  double input_dropout = 0.2;
  double recurrent_dropout = 0.1;

  int embedding_dim() const { return hidden * directions * layers; }
};

struct StyleGruParams {
  StyleGruConfig config;
  GruStackT<double> gru;
  AuxClassifier aux;

  static StyleGruParams create(const StyleGruConfig& config, std::uint64_t seed);
  static StyleGruParams zeros(const StyleGruConfig& config);

  // Canonical parameter order; graph leaves and optimizers follow it.
  void register_params(nn::ParamRegistry& registry,
                       const std::string& prefix = "stylegru.");
};

// Operation-level entry points.
StyleEmbedding encode(const StyleFlow& flow, const StyleGruParams& params,
                      Mode mode, Pcg32* rng = nullptr);
double aux_classify(const StyleEmbedding& embedding,
                    const StyleGruParams& params);

// ---- tape graph builders (training path) ----

// Leaf vars mirroring register_params order.
struct GruGraphLeaves {
  std::vector<ad::Var> ordered;               // registry order
  std::vector<std::array<ad::Var, 9>> cells;  // wz,uz,bz,wr,ur,br,wh,uh,bh
  std::array<ad::Var, 8> aux;                 // w1,b1,w2,b2,w3,b3,wout,bout
};

GruGraphLeaves make_leaves(ad::Tape& tape, const StyleGruParams& params,
                           bool requires_grad);

// Batched forward. inputs[t] is (input_dim x batch). Returns the flattened
// embedding matrix (embedding_dim x batch). Train mode draws dropout masks
// from rng: elementwise inverted dropout on the input sequence, plus one
// variational mask per (layer, direction) applied to the hidden state as it
// enters the gates.
ad::Var encode_graph(ad::Tape& tape, const GruGraphLeaves& leaves,
                     const StyleGruConfig& config,
                     const std::vector<Mat>& inputs, Mode mode,
                     Pcg32* rng = nullptr);

// (1 x batch) logits from flattened embeddings.
ad::Var aux_logit_graph(ad::Tape& tape, const GruGraphLeaves& leaves,
                        const ad::Var& embedding);

// Flow window -> (input_dim x timesteps) double matrix, level-major rows.
Mat flow_to_input(const StyleFlow& flow);

}  // namespace slf::gru
