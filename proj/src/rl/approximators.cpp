#include "deconf/rl/approximators.hpp"

#include "deconf/core/text_io.hpp"

#include <sstream>

namespace deconf::rl {

Mlp
make_network(std::size_t input_dim,
             std::size_t output_dim,
             const std::vector<std::size_t>& hidden,
             const Vector& input_scale)
{
  std::vector<std::size_t> sizes{ input_dim };
  sizes.insert(sizes.end(), hidden.begin(), hidden.end());
  sizes.push_back(output_dim);
  Vector scale = input_scale.size() == 0 ? Vector::Ones(static_cast<Eigen::Index>(input_dim)) : input_scale;
  return Mlp(std::move(sizes), std::move(scale));
}

Vector
pendulum_input_scale()
{
  return Eigen::Vector3d(1.0, 1.0, 1.0 / 8.0);
}

Vector
state_input(const StateVec& s, std::size_t input_dim)
{
  if (input_dim == 1)
    return Vector::Constant(1, s.x);
  if (input_dim != 3)
    throw Error("state input must have dimension 1 or 3");
  return Eigen::Vector3d(s.x, s.y, s.v);
}

Matrix
softmax(const Matrix& logits)
{
  Matrix out = logits.rowwise() - logits.colwise().maxCoeff();
  out = out.array().exp().matrix();
  out.array().rowwise() /= out.colwise().sum().array();
  return out;
}

Matrix
log_softmax(const Matrix& logits)
{
  Matrix shifted = logits.rowwise() - logits.colwise().maxCoeff();
  Eigen::RowVectorXd lse = shifted.array().exp().colwise().sum().log().matrix();
  return shifted.rowwise() - lse;
}

QApproximator::QApproximator(Mlp net, std::uint64_t seed)
  : net_(std::move(net))
  , params_(net_.initial_params(seed))
  , target_(params_)
{
}

QApproximator::QApproximator(Mlp net, Vector params)
  : net_(std::move(net))
  , params_(std::move(params))
  , target_(params_)
{
  if (static_cast<std::size_t>(params_.size()) != net_.num_params())
    throw Error("parameter vector does not fit the architecture");
}

Vector
QApproximator::forward(const StateVec& s) const
{
  return net_.forward(params_, state_input(s, net_.input_dim()));
}

std::size_t
QApproximator::greedy_action(const StateVec& s) const
{
  Eigen::Index best;
  forward(s).maxCoeff(&best);
  return static_cast<std::size_t>(best);
}

PolicyHead::PolicyHead(Mlp net, std::uint64_t seed)
  : net_(std::move(net))
  , params_(net_.initial_params(seed))
{
}

PolicyHead::PolicyHead(Mlp net, Vector params)
  : net_(std::move(net))
  , params_(std::move(params))
{
  if (static_cast<std::size_t>(params_.size()) != net_.num_params())
    throw Error("parameter vector does not fit the architecture");
}

Matrix
PolicyHead::probabilities(const Matrix& states) const
{
  return softmax(logits(states));
}

Vector
PolicyHead::probabilities(const StateVec& s) const
{
  return probabilities(Matrix(state_input(s, net_.input_dim()))).col(0);
}

std::size_t
PolicyHead::greedy_action(const StateVec& s) const
{
  Eigen::Index best;
  net_.forward(params_, state_input(s, net_.input_dim())).col(0).maxCoeff(&best);
  return static_cast<std::size_t>(best);
}

std::string
serialize_params(const Mlp& net, const Vector& params)
{
  std::string out = "# architecture=";
  for (std::size_t i = 0; i < net.sizes().size(); ++i)
    out += (i ? "," : "") + std::to_string(net.sizes()[i]);
  out += "\n# input_scale=";
  for (Eigen::Index i = 0; i < net.input_scale().size(); ++i)
    out += (i ? "," : "") + text::format_real(net.input_scale()(i));
  out += "\n# n=" + std::to_string(params.size()) + "\n";
  for (Eigen::Index i = 0; i < params.size(); ++i)
    out += text::format_real(params(i)) + '\n';
  return out;
}

std::pair<Mlp, Vector>
parse_params(const std::string& contents)
{
  text::Header header;
  std::vector<double> values;
  std::istringstream in(contents);
  std::string line;
  while (std::getline(in, line)) {
    if (!line.empty() && line.front() == '#') {
      text::parse_header_line(line, header);
      continue;
    }
    if (!text::trim(line).empty())
      values.push_back(text::parse_real(text::trim(line)));
  }
  std::vector<std::size_t> sizes;
  for (auto tok : text::split(header.at("architecture"), ','))
    sizes.push_back(static_cast<std::size_t>(text::parse_int(tok)));
  std::vector<double> scale;
  for (auto tok : text::split(header.at("input_scale"), ','))
    scale.push_back(text::parse_real(tok));
  Mlp net(sizes, Eigen::Map<const Vector>(scale.data(), static_cast<Eigen::Index>(scale.size())));
  if (values.size() != net.num_params())
    throw Error("parameter file holds " + std::to_string(values.size()) + " values, architecture needs " +
                std::to_string(net.num_params()));
  return { net, Eigen::Map<const Vector>(values.data(), static_cast<Eigen::Index>(values.size())) };
}

void
save_params(const Mlp& net, const Vector& params, const std::filesystem::path& path)
{
  text::write_atomic(path, serialize_params(net, params));
}

std::pair<Mlp, Vector>
load_params(const std::filesystem::path& path)
{
  return parse_params(text::read_file(path));
}

} // namespace deconf::rl
