#include "windcast/checkpoint.hpp"

#include <fstream>
#include <sstream>
#include <vector>

#include "windcast/csv.hpp"
#include "windcast/errors.hpp"

namespace windcast {

namespace {

constexpr const char* kMagic = "windcast-checkpoint v1";

}  // namespace

void save_checkpoint(const std::string& path, const Checkpoint& checkpoint) {
  std::ofstream out(path);
  if (!out) raise(ErrorCode::io_error, "cannot write " + path);

  out << kMagic << '\n';
  out << "layers " << checkpoint.net.layers.size() << '\n';
  out << "units";
  for (const LstmLayer& layer : checkpoint.net.layers) {
    out << ' ' << layer.units();
  }
  out << '\n';
  out << "input_size " << checkpoint.net.input_size() << '\n';
  out << "lag " << checkpoint.lag << '\n';
  out << "horizon " << checkpoint.horizon << '\n';
  out << "seed " << checkpoint.seed << '\n';
  out << "norm_shift " << format_double(checkpoint.norm.shift) << '\n';
  out << "norm_scale " << format_double(checkpoint.norm.scale) << '\n';
  out << "hidden_layers " << checkpoint.hp.hidden_layers << '\n';
  out << "units1 " << checkpoint.hp.units[0] << '\n';
  out << "units2 " << checkpoint.hp.units[1] << '\n';
  out << "learning_rate " << format_double(checkpoint.hp.learning_rate) << '\n';
  out << "batch_size " << checkpoint.hp.batch_size << '\n';
  out << "optimizer " << optimizer_name(checkpoint.hp.optimizer) << '\n';
  out << "train_rmse " << format_double(checkpoint.train_rmse) << '\n';
  out << "test_rmse " << format_double(checkpoint.test_rmse) << '\n';

  auto& net = const_cast<LstmNetwork&>(checkpoint.net);
  net.visit_params([&](const std::string& name, auto& block) {
    const Eigen::Index rows = block.rows();
    const Eigen::Index cols = block.cols();
    out << "param " << name << ' ' << rows << ' ' << cols << '\n';
    for (Eigen::Index r = 0; r < rows; ++r) {
      for (Eigen::Index c = 0; c < cols; ++c) {
        out << (c ? " " : "") << format_double(block(r, c));
      }
      out << '\n';
    }
  });
  out << "param head.b 1 1\n" << format_double(checkpoint.net.head.b) << '\n';
  out << "end\n";
  if (!out) raise(ErrorCode::io_error, "short write to " + path);
}

namespace {

std::string next_line(std::ifstream& in, const std::string& path) {
  std::string line;
  if (!std::getline(in, line)) {
    raise(ErrorCode::incompatible_checkpoint, path + ": truncated file");
  }
  return line;
}

std::vector<std::string> split_spaces(const std::string& line) {
  std::vector<std::string> out;
  std::istringstream stream(line);
  std::string token;
  while (stream >> token) out.push_back(token);
  return out;
}

double parse_double_token(const std::string& token, const std::string& path) {
  char* end = nullptr;
  const double v = std::strtod(token.c_str(), &end);
  if (end == token.c_str() || *end != '\0') {
    raise(ErrorCode::incompatible_checkpoint,
          path + ": bad number '" + token + "'");
  }
  return v;
}

std::string expect_scalar(std::ifstream& in, const std::string& path,
                          const std::string& key) {
  const std::vector<std::string> tokens = split_spaces(next_line(in, path));
  if (tokens.size() != 2 || tokens[0] != key) {
    raise(ErrorCode::incompatible_checkpoint,
          path + ": expected '" + key + " <value>'");
  }
  return tokens[1];
}

}  // namespace

Checkpoint load_checkpoint(const std::string& path) {
  std::ifstream in(path);
  if (!in) raise(ErrorCode::file_not_found, path);

  if (next_line(in, path) != kMagic) {
    raise(ErrorCode::incompatible_checkpoint, path + ": not a checkpoint");
  }

  Checkpoint checkpoint;
  const int n_layers = std::stoi(expect_scalar(in, path, "layers"));
  if (n_layers < 1 || n_layers > 64) {
    raise(ErrorCode::incompatible_checkpoint, path + ": bad layer count");
  }
  const std::vector<std::string> units_tokens =
      split_spaces(next_line(in, path));
  if (units_tokens.size() != static_cast<std::size_t>(n_layers) + 1 ||
      units_tokens[0] != "units") {
    raise(ErrorCode::incompatible_checkpoint, path + ": bad units line");
  }
  std::vector<int> units;
  for (int l = 0; l < n_layers; ++l) {
    units.push_back(std::stoi(units_tokens[static_cast<std::size_t>(l) + 1]));
    if (units.back() < 1) {
      raise(ErrorCode::incompatible_checkpoint, path + ": bad unit count");
    }
  }
  const int input_size = std::stoi(expect_scalar(in, path, "input_size"));
  checkpoint.lag = std::stoi(expect_scalar(in, path, "lag"));
  checkpoint.horizon = std::stoi(expect_scalar(in, path, "horizon"));
  checkpoint.seed = std::stoull(expect_scalar(in, path, "seed"));
  checkpoint.norm.shift =
      parse_double_token(expect_scalar(in, path, "norm_shift"), path);
  checkpoint.norm.scale =
      parse_double_token(expect_scalar(in, path, "norm_scale"), path);
  checkpoint.hp.hidden_layers =
      std::stoi(expect_scalar(in, path, "hidden_layers"));
  checkpoint.hp.units[0] = std::stoi(expect_scalar(in, path, "units1"));
  checkpoint.hp.units[1] = std::stoi(expect_scalar(in, path, "units2"));
  checkpoint.hp.learning_rate =
      parse_double_token(expect_scalar(in, path, "learning_rate"), path);
  checkpoint.hp.batch_size = std::stoi(expect_scalar(in, path, "batch_size"));
  checkpoint.hp.optimizer =
      optimizer_from_name(expect_scalar(in, path, "optimizer"));
  checkpoint.train_rmse =
      parse_double_token(expect_scalar(in, path, "train_rmse"), path);
  checkpoint.test_rmse =
      parse_double_token(expect_scalar(in, path, "test_rmse"), path);

  // Build the skeleton, then fill parameters in visitation order.
  checkpoint.net.layers.clear();
  int in_size = input_size;
  for (const int u : units) {
    checkpoint.net.layers.push_back(LstmLayer::zeros(in_size, u));
    in_size = u;
  }
  checkpoint.net.head.w = Eigen::VectorXd::Zero(units.back());

  checkpoint.net.visit_params([&](const std::string& name, auto& block) {
    const std::vector<std::string> header = split_spaces(next_line(in, path));
    if (header.size() != 4 || header[0] != "param" || header[1] != name) {
      raise(ErrorCode::incompatible_checkpoint,
            path + ": expected parameter '" + name + "'");
    }
    if (std::stol(header[2]) != block.rows() ||
        std::stol(header[3]) != block.cols()) {
      raise(ErrorCode::incompatible_checkpoint,
            path + ": '" + name + "' has unexpected shape");
    }
    for (Eigen::Index r = 0; r < block.rows(); ++r) {
      const std::vector<std::string> row = split_spaces(next_line(in, path));
      if (row.size() != static_cast<std::size_t>(block.cols())) {
        raise(ErrorCode::incompatible_checkpoint,
              path + ": '" + name + "' row " + std::to_string(r) +
                  " has wrong width");
      }
      for (Eigen::Index c = 0; c < block.cols(); ++c) {
        block(r, c) = parse_double_token(row[static_cast<std::size_t>(c)], path);
      }
    }
  });

  const std::vector<std::string> head_b = split_spaces(next_line(in, path));
  if (head_b.size() != 4 || head_b[0] != "param" || head_b[1] != "head.b") {
    raise(ErrorCode::incompatible_checkpoint, path + ": expected head bias");
  }
  checkpoint.net.head.b =
      parse_double_token(split_spaces(next_line(in, path)).at(0), path);
  if (next_line(in, path) != "end") {
    raise(ErrorCode::incompatible_checkpoint, path + ": missing end marker");
  }
  return checkpoint;
}

}  // namespace windcast
