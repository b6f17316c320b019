#include <numeric>

#include "quizwright/quizbank.hpp"

namespace qw::quiz {

std::vector<Question> select_questions(const QuizBank& bank, const TestConfig& config, std::uint64_t seed) {
  const std::size_t n = bank.questions.size();
  if (config.question_count > n) {
    throw QuizError("test asks for " + std::to_string(config.question_count) + " questions but the bank has " +
                    std::to_string(n));
  }
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  if (config.shuffle && n > 1) {
    SplitMix64 rng(seed);
    for (std::size_t i = n - 1; i > 0; --i) {
      std::size_t j = static_cast<std::size_t>(rng.next() % (i + 1));
      std::swap(order[i], order[j]);
    }
  }
  std::vector<Question> out;
  out.reserve(config.question_count);
  for (std::size_t k = 0; k < config.question_count; ++k) out.push_back(bank.questions[order[k]]);
  return out;
}

}  // namespace qw::quiz
