#include "seqfuse/simulator.hpp"

#include <string>

#include "seqfuse/random.hpp"

namespace seqfuse {

namespace {

constexpr std::uint64_t kGroundTruthStream = 0xFFFF'FFFF'FFFF'FFFFULL;

bool is_probability(double p) { return p >= 0.0 && p <= 1.0; }

}  // namespace

void NoiseModel::validate() const {
  if (!is_probability(p_sub) || !is_probability(p_ins) || !is_probability(p_del)) {
    throw Error(ErrorCode::InvalidArgument, "noise probabilities must lie in [0, 1]");
  }
  if (p_sub + p_del > 1.0) throw Error(ErrorCode::InvalidArgument, "p_sub + p_del must not exceed 1");
}

Sequence perturb(const Sequence& gt, const NoiseModel& model, std::size_t alphabet_size, std::uint64_t stream_id,
                 std::uint64_t sentence_index) {
  model.validate();
  if (alphabet_size < 2) throw Error(ErrorCode::InvalidArgument, "perturb needs at least two tokens");
  StreamRng rng(model.seed, stream_id, sentence_index);
  const auto n = static_cast<std::uint64_t>(alphabet_size);

  Sequence out;
  auto maybe_insert = [&] {
    if (rng.uniform() < model.p_ins) out.push_back(static_cast<Token>(rng.below(n)));
  };
  for (Token t : gt) {
    maybe_insert();
    const double u = rng.uniform();
    if (u < model.p_del) continue;
    if (u < model.p_del + model.p_sub) {
      // uniform over the other n - 1 tokens
      auto r = static_cast<Token>(rng.below(n - 1));
      out.push_back(r >= t ? r + 1 : r);
    } else {
      out.push_back(t);
    }
  }
  maybe_insert();
  return out;
}

SimulatedExperiment simulate_experiment(std::size_t n_sentences, std::size_t min_len, std::size_t max_len,
                                        std::size_t k_models, const NoiseModel& model, std::size_t alphabet_size) {
  if (k_models < 1) throw Error(ErrorCode::InvalidArgument, "simulation needs at least one model");
  if (min_len < 1 || min_len > max_len) throw Error(ErrorCode::InvalidArgument, "bad sentence length range");
  model.validate();

  SimulatedExperiment exp;
  exp.ground_truth.reserve(n_sentences);
  for (std::size_t i = 0; i < n_sentences; ++i) {
    StreamRng rng(model.seed, kGroundTruthStream, i);
    const std::size_t len = min_len + static_cast<std::size_t>(rng.below(max_len - min_len + 1));
    Sequence s;
    for (std::size_t p = 0; p < len; ++p) s.push_back(static_cast<Token>(rng.below(alphabet_size)));
    exp.ground_truth.push_back(std::move(s));
  }
  exp.predictions.assign(k_models, {});
  for (std::size_t m = 0; m < k_models; ++m) {
    exp.predictions[m].reserve(n_sentences);
    for (std::size_t i = 0; i < n_sentences; ++i) {
      exp.predictions[m].push_back(perturb(exp.ground_truth[i], model, alphabet_size, m, i));
    }
  }
  return exp;
}

}  // namespace seqfuse
