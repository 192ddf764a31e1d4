#include "windcast/lstm.hpp"

#include <cmath>

#include "windcast/errors.hpp"
#include "windcast/rng.hpp"

namespace windcast {

namespace {

Eigen::MatrixXd logistic(const Eigen::MatrixXd& x) {
  return (1.0 / (1.0 + (-x.array()).exp())).matrix();
}

void fill_uniform(Eigen::MatrixXd& m, SeededRng& rng, double bound) {
  for (Eigen::Index k = 0; k < m.size(); ++k) {
    m.data()[k] = rng.uniform(-bound, bound);
  }
}

void fill_uniform(Eigen::VectorXd& v, SeededRng& rng, double bound) {
  for (Eigen::Index k = 0; k < v.size(); ++k) {
    v(k) = rng.uniform(-bound, bound);
  }
}

}  // namespace

LstmLayer LstmLayer::zeros(int input_size, int units) {
  LstmLayer layer;
  const auto u = static_cast<Eigen::Index>(units);
  const auto d = static_cast<Eigen::Index>(input_size);
  for (Eigen::MatrixXd* m : {&layer.wx_i, &layer.wx_f, &layer.wx_g, &layer.wx_o}) {
    *m = Eigen::MatrixXd::Zero(u, d);
  }
  for (Eigen::MatrixXd* m : {&layer.wh_i, &layer.wh_f, &layer.wh_g, &layer.wh_o}) {
    *m = Eigen::MatrixXd::Zero(u, u);
  }
  for (Eigen::VectorXd* v : {&layer.pc_i, &layer.pc_f, &layer.pc_o, &layer.b_i,
                             &layer.b_f, &layer.b_g, &layer.b_o}) {
    *v = Eigen::VectorXd::Zero(u);
  }
  return layer;
}

std::size_t LstmNetwork::parameter_count() const {
  std::size_t count = 0;
  for (const LstmLayer& lay : layers) {
    const std::size_t u = static_cast<std::size_t>(lay.units());
    const std::size_t d = static_cast<std::size_t>(lay.input_size());
    count += 4 * u * d + 4 * u * u + 3 * u + 4 * u;
  }
  count += static_cast<std::size_t>(head.w.size()) + 1;
  return count;
}

Eigen::VectorXd LstmNetwork::flatten() const {
  Eigen::VectorXd out(static_cast<Eigen::Index>(parameter_count()));
  Eigen::Index offset = 0;
  // visit_params only writes through the visitor, never the blocks.
  auto& self = const_cast<LstmNetwork&>(*this);
  self.visit_params([&](const std::string&, auto& block) {
    out.segment(offset, block.size()) =
        Eigen::Map<const Eigen::VectorXd>(block.data(), block.size());
    offset += block.size();
  });
  out(offset++) = head.b;
  return out;
}

void LstmNetwork::unflatten(const Eigen::VectorXd& params) {
  if (params.size() != static_cast<Eigen::Index>(parameter_count())) {
    raise(ErrorCode::shape_mismatch,
          "expected " + std::to_string(parameter_count()) + " parameters, got " +
              std::to_string(params.size()));
  }
  Eigen::Index offset = 0;
  visit_params([&](const std::string&, auto& block) {
    Eigen::Map<Eigen::VectorXd>(block.data(), block.size()) =
        params.segment(offset, block.size());
    offset += block.size();
  });
  head.b = params(offset++);
}

LstmNetwork make_network(int input_size, std::span<const int> units_per_layer,
                         std::uint64_t seed) {
  if (input_size < 1) raise(ErrorCode::bad_params, "input size must be >= 1");
  if (units_per_layer.empty()) {
    raise(ErrorCode::bad_params, "need at least one layer");
  }
  for (const int u : units_per_layer) {
    if (u < 1) raise(ErrorCode::bad_params, "layer units must be >= 1");
  }

  SeededRng rng(seed);
  LstmNetwork net;
  int in = input_size;
  for (const int u : units_per_layer) {
    LstmLayer layer = LstmLayer::zeros(in, u);
    const double bound = 1.0 / std::sqrt(static_cast<double>(u));
    for (Eigen::MatrixXd* m : {&layer.wx_i, &layer.wh_i, &layer.wx_f,
                               &layer.wh_f, &layer.wx_g, &layer.wh_g,
                               &layer.wx_o, &layer.wh_o}) {
      fill_uniform(*m, rng, bound);
    }
    for (Eigen::VectorXd* v : {&layer.pc_i, &layer.pc_f, &layer.pc_o}) {
      fill_uniform(*v, rng, bound);
    }
    layer.b_f.setOnes();  // start remembering, the usual forget-bias trick
    net.layers.push_back(std::move(layer));
    in = u;
  }
  const int last = units_per_layer[units_per_layer.size() - 1];
  net.head.w.resize(last);
  fill_uniform(net.head.w, rng, 1.0 / std::sqrt(static_cast<double>(last)));
  net.head.b = 0.0;
  return net;
}

LstmState cell_forward(const LstmLayer& layer, const Eigen::MatrixXd& x,
                       const LstmState& prev, GateRecord* record) {
  const Eigen::Index u = layer.b_i.size();
  const Eigen::Index batch = x.cols();
  if (x.rows() != layer.wx_i.cols()) {
    raise(ErrorCode::shape_mismatch,
          "cell input rows " + std::to_string(x.rows()) + " vs weight cols " +
              std::to_string(layer.wx_i.cols()));
  }
  if (prev.c.rows() != u || prev.m.rows() != u || prev.c.cols() != batch ||
      prev.m.cols() != batch) {
    raise(ErrorCode::shape_mismatch, "state shape does not match layer/batch");
  }

  Eigen::MatrixXd pre_i = layer.wx_i * x + layer.wh_i * prev.m;
  pre_i.colwise() += layer.b_i;
  pre_i.array() += prev.c.array().colwise() * layer.pc_i.array();
  const Eigen::MatrixXd i = logistic(pre_i);

  Eigen::MatrixXd pre_f = layer.wx_f * x + layer.wh_f * prev.m;
  pre_f.colwise() += layer.b_f;
  pre_f.array() += prev.c.array().colwise() * layer.pc_f.array();
  const Eigen::MatrixXd f = logistic(pre_f);

  Eigen::MatrixXd pre_g = layer.wx_g * x + layer.wh_g * prev.m;
  pre_g.colwise() += layer.b_g;
  const Eigen::MatrixXd g = pre_g.array().tanh().matrix();

  const Eigen::MatrixXd c =
      (f.array() * prev.c.array() + i.array() * g.array()).matrix();

  // The output gate peeks at the cell state of the *current* step.
  Eigen::MatrixXd pre_o = layer.wx_o * x + layer.wh_o * prev.m;
  pre_o.colwise() += layer.b_o;
  pre_o.array() += c.array().colwise() * layer.pc_o.array();
  const Eigen::MatrixXd o = logistic(pre_o);

  const Eigen::MatrixXd tanh_c = c.array().tanh().matrix();
  LstmState next{c, (o.array() * tanh_c.array()).matrix()};
  if (record) {
    record->i = i;
    record->f = f;
    record->g = g;
    record->o = o;
    record->c = c;
    record->tanh_c = tanh_c;
  }
  return next;
}

namespace {

Eigen::RowVectorXd forward_readout(
    const LstmNetwork& net, const Eigen::MatrixXd& windows,
    std::vector<std::vector<GateRecord>>* records,
    std::vector<std::vector<Eigen::MatrixXd>>* activations) {
  const Eigen::Index steps = windows.rows();
  const Eigen::Index batch = windows.cols();
  if (steps < 1 || batch < 1) raise(ErrorCode::empty_input, "empty windows");
  if (net.layers.empty()) raise(ErrorCode::shape_mismatch, "network has no layers");
  if (net.input_size() != 1) {
    raise(ErrorCode::shape_mismatch, "scalar series expects input size 1");
  }
  if (net.head.w.size() != net.layers.back().b_i.size()) {
    raise(ErrorCode::shape_mismatch, "head width does not match last layer");
  }

  const std::size_t n_layers = net.layers.size();
  if (records) records->assign(n_layers, std::vector<GateRecord>(steps));
  if (activations) activations->assign(n_layers + 1, {});

  std::vector<Eigen::MatrixXd> seq(static_cast<std::size_t>(steps));
  for (Eigen::Index t = 0; t < steps; ++t) {
    seq[static_cast<std::size_t>(t)] = windows.row(t);
  }
  if (activations) (*activations)[0] = seq;

  for (std::size_t l = 0; l < n_layers; ++l) {
    const LstmLayer& layer = net.layers[l];
    LstmState state = LstmState::zero(layer.units(), static_cast<int>(batch));
    for (Eigen::Index t = 0; t < steps; ++t) {
      GateRecord* rec =
          records ? &(*records)[l][static_cast<std::size_t>(t)] : nullptr;
      state = cell_forward(layer, seq[static_cast<std::size_t>(t)], state, rec);
      seq[static_cast<std::size_t>(t)] = state.m;
    }
    if (activations) (*activations)[l + 1] = seq;
  }

  return net.head.w.transpose() * seq[static_cast<std::size_t>(steps - 1)] +
         Eigen::RowVectorXd::Constant(batch, net.head.b);
}

}  // namespace

Eigen::VectorXd predict(const LstmNetwork& net, const Eigen::MatrixXd& windows) {
  return forward_readout(net, windows, nullptr, nullptr).transpose();
}

double sequence_forward(const LstmNetwork& net, std::span<const double> window) {
  if (window.empty()) raise(ErrorCode::empty_input, "empty window");
  const Eigen::Map<const Eigen::VectorXd> w(window.data(),
                                            static_cast<Eigen::Index>(window.size()));
  return predict(net, w)(0);
}

double loss_mse(const Eigen::VectorXd& predictions,
                const Eigen::VectorXd& targets) {
  if (predictions.size() != targets.size()) {
    raise(ErrorCode::length_mismatch,
          std::to_string(predictions.size()) + " predictions vs " +
              std::to_string(targets.size()) + " targets");
  }
  if (predictions.size() == 0) raise(ErrorCode::empty_input, "no samples");
  return (predictions - targets).squaredNorm() /
         static_cast<double>(predictions.size());
}

Eigen::VectorXd backward_bptt(const LstmNetwork& net,
                              const Eigen::MatrixXd& windows,
                              const Eigen::VectorXd& targets,
                              double* loss_out) {
  const Eigen::Index steps = windows.rows();
  const Eigen::Index batch = windows.cols();
  if (targets.size() != batch) {
    raise(ErrorCode::length_mismatch,
          std::to_string(batch) + " windows vs " + std::to_string(targets.size()) +
              " targets");
  }

  std::vector<std::vector<GateRecord>> rec;
  std::vector<std::vector<Eigen::MatrixXd>> acts;
  const Eigen::RowVectorXd y = forward_readout(net, windows, &rec, &acts);

  const Eigen::VectorXd residual = y.transpose() - targets;
  if (loss_out) {
    *loss_out = residual.squaredNorm() / static_cast<double>(batch);
  }
  const Eigen::VectorXd dy = residual * (2.0 / static_cast<double>(batch));

  LstmNetwork grads;
  for (const LstmLayer& layer : net.layers) {
    grads.layers.push_back(LstmLayer::zeros(layer.input_size(), layer.units()));
  }
  const std::size_t n_layers = net.layers.size();
  grads.head.w = acts[n_layers][static_cast<std::size_t>(steps - 1)] * dy;
  grads.head.b = dy.sum();

  // dm flowing into each timestep of the layer being processed, from the
  // head (top layer, last step) or from the layer above (its dx).
  std::vector<Eigen::MatrixXd> dm_ext(static_cast<std::size_t>(steps));
  const Eigen::Index top_units = net.layers.back().b_i.size();
  for (Eigen::Index t = 0; t < steps; ++t) {
    dm_ext[static_cast<std::size_t>(t)] =
        Eigen::MatrixXd::Zero(top_units, batch);
  }
  dm_ext[static_cast<std::size_t>(steps - 1)] = net.head.w * dy.transpose();

  for (std::size_t l = n_layers; l-- > 0;) {
    const LstmLayer& layer = net.layers[l];
    LstmLayer& gl = grads.layers[l];
    const Eigen::Index u = layer.b_i.size();
    const Eigen::MatrixXd zero_state = Eigen::MatrixXd::Zero(u, batch);

    std::vector<Eigen::MatrixXd> dx(l > 0 ? static_cast<std::size_t>(steps) : 0);
    Eigen::MatrixXd dm_rec = Eigen::MatrixXd::Zero(u, batch);
    Eigen::MatrixXd dc_carry = Eigen::MatrixXd::Zero(u, batch);

    for (Eigen::Index t = steps - 1; t >= 0; --t) {
      const GateRecord& r = rec[l][static_cast<std::size_t>(t)];
      const Eigen::MatrixXd& x = acts[l][static_cast<std::size_t>(t)];
      const Eigen::MatrixXd& m_prev =
          t > 0 ? acts[l + 1][static_cast<std::size_t>(t - 1)] : zero_state;
      const Eigen::MatrixXd& c_prev =
          t > 0 ? rec[l][static_cast<std::size_t>(t - 1)].c : zero_state;

      const Eigen::MatrixXd dm =
          dm_ext[static_cast<std::size_t>(t)] + dm_rec;
      const Eigen::MatrixXd da_o =
          (dm.array() * r.tanh_c.array() * r.o.array() * (1.0 - r.o.array()))
              .matrix();
      Eigen::MatrixXd dc =
          dc_carry +
          (dm.array() * r.o.array() * (1.0 - r.tanh_c.array().square()))
              .matrix();
      dc.array() += da_o.array().colwise() * layer.pc_o.array();

      const Eigen::MatrixXd da_i =
          (dc.array() * r.g.array() * r.i.array() * (1.0 - r.i.array()))
              .matrix();
      const Eigen::MatrixXd da_f =
          (dc.array() * c_prev.array() * r.f.array() * (1.0 - r.f.array()))
              .matrix();
      const Eigen::MatrixXd da_g =
          (dc.array() * r.i.array() * (1.0 - r.g.array().square())).matrix();

      gl.wx_i.noalias() += da_i * x.transpose();
      gl.wx_f.noalias() += da_f * x.transpose();
      gl.wx_g.noalias() += da_g * x.transpose();
      gl.wx_o.noalias() += da_o * x.transpose();
      if (t > 0) {
        gl.wh_i.noalias() += da_i * m_prev.transpose();
        gl.wh_f.noalias() += da_f * m_prev.transpose();
        gl.wh_g.noalias() += da_g * m_prev.transpose();
        gl.wh_o.noalias() += da_o * m_prev.transpose();
        gl.pc_i += (da_i.array() * c_prev.array()).rowwise().sum().matrix();
        gl.pc_f += (da_f.array() * c_prev.array()).rowwise().sum().matrix();
      }
      gl.pc_o += (da_o.array() * r.c.array()).rowwise().sum().matrix();
      gl.b_i += da_i.rowwise().sum();
      gl.b_f += da_f.rowwise().sum();
      gl.b_g += da_g.rowwise().sum();
      gl.b_o += da_o.rowwise().sum();

      dm_rec.noalias() = layer.wh_i.transpose() * da_i;
      dm_rec.noalias() += layer.wh_f.transpose() * da_f;
      dm_rec.noalias() += layer.wh_g.transpose() * da_g;
      dm_rec.noalias() += layer.wh_o.transpose() * da_o;

      dc_carry = (dc.array() * r.f.array()).matrix();
      dc_carry.array() += da_i.array().colwise() * layer.pc_i.array();
      dc_carry.array() += da_f.array().colwise() * layer.pc_f.array();

      if (l > 0) {
        Eigen::MatrixXd& d = dx[static_cast<std::size_t>(t)];
        d.noalias() = layer.wx_i.transpose() * da_i;
        d.noalias() += layer.wx_f.transpose() * da_f;
        d.noalias() += layer.wx_g.transpose() * da_g;
        d.noalias() += layer.wx_o.transpose() * da_o;
      }
    }
    if (l > 0) dm_ext = std::move(dx);
  }

  return grads.flatten();
}

}  // namespace windcast
