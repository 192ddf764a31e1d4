#pragma once

#include <Eigen/Core>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

namespace windcast {

// One peephole LSTM layer. wx_* act on the layer input, wh_* on the previous
// block output m, and pc_* are the diagonal peephole weights reading the
// cell state: the input and forget gates peek at c from the previous step,
// the output gate at the freshly updated c of the current step.
struct LstmLayer {
  Eigen::MatrixXd wx_i, wx_f, wx_g, wx_o;  // units x input_size
  Eigen::MatrixXd wh_i, wh_f, wh_g, wh_o;  // units x units
  Eigen::VectorXd pc_i, pc_f, pc_o;        // units
  Eigen::VectorXd b_i, b_f, b_g, b_o;      // units

  int units() const { return static_cast<int>(b_i.size()); }
  int input_size() const { return static_cast<int>(wx_i.cols()); }

  static LstmLayer zeros(int input_size, int units);
};

// Linear readout of the last block output.
struct OutputHead {
  Eigen::VectorXd w;
  double b = 0.0;
};

// Cell state and block output, one column per batch sample.
struct LstmState {
  Eigen::MatrixXd c, m;

  static LstmState zero(int units, int batch) {
    return {Eigen::MatrixXd::Zero(units, batch),
            Eigen::MatrixXd::Zero(units, batch)};
  }
};

// Gate activations of one timestep, kept around for backpropagation.
struct GateRecord {
  Eigen::MatrixXd i, f, g, o, c, tanh_c;
};

struct LstmNetwork {
  std::vector<LstmLayer> layers;
  OutputHead head;

  int input_size() const { return layers.front().input_size(); }
  std::size_t parameter_count() const;

  // All parameters as one vector (layer order, then the head). The layout is
  // stable; unflatten() of flatten() is the identity.
  Eigen::VectorXd flatten() const;
  void unflatten(const Eigen::VectorXd& params);

  // Calls visitor(name, matrix) for every parameter block in layout order.
  template <class Visitor>
  void visit_params(Visitor&& visit) {
    for (std::size_t l = 0; l < layers.size(); ++l) {
      LstmLayer& lay = layers[l];
      const std::string p = "layer" + std::to_string(l) + ".";
      visit(p + "wx_i", lay.wx_i);
      visit(p + "wh_i", lay.wh_i);
      visit(p + "wx_f", lay.wx_f);
      visit(p + "wh_f", lay.wh_f);
      visit(p + "wx_g", lay.wx_g);
      visit(p + "wh_g", lay.wh_g);
      visit(p + "wx_o", lay.wx_o);
      visit(p + "wh_o", lay.wh_o);
      visit(p + "pc_i", lay.pc_i);
      visit(p + "pc_f", lay.pc_f);
      visit(p + "pc_o", lay.pc_o);
      visit(p + "b_i", lay.b_i);
      visit(p + "b_f", lay.b_f);
      visit(p + "b_g", lay.b_g);
      visit(p + "b_o", lay.b_o);
    }
    visit("head.w", head.w);
  }
};

// Fresh network with uniform [-1/sqrt(units), 1/sqrt(units)] weights, zero
// biases except the forget bias at +1, and a zero head bias.
LstmNetwork make_network(int input_size, std::span<const int> units_per_layer,
                         std::uint64_t seed);

// One step over a batch (columns = samples). When `record` is given the gate
// activations are stored for backward_bptt.
LstmState cell_forward(const LstmLayer& layer, const Eigen::MatrixXd& x,
                       const LstmState& prev, GateRecord* record = nullptr);

// Runs the whole stack over one scalar window, zero-initialized state.
double sequence_forward(const LstmNetwork& net, std::span<const double> window);

// Batched readout: windows is lag x batch, result is one value per column.
Eigen::VectorXd predict(const LstmNetwork& net, const Eigen::MatrixXd& windows);

double loss_mse(const Eigen::VectorXd& predictions,
                const Eigen::VectorXd& targets);

// Mean-squared-error gradient over the batch for every parameter, flattened
// in the same order as flatten(). Optionally reports the forward loss.
Eigen::VectorXd backward_bptt(const LstmNetwork& net,
                              const Eigen::MatrixXd& windows,
                              const Eigen::VectorXd& targets,
                              double* loss_out = nullptr);

}  // namespace windcast
