#include "keyguess/cipher.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <numeric>
#include <string>

#include "keyguess/errors.hpp"
#include "keyguess/kernels.hpp"

namespace keyguess {
namespace {

constexpr double kLn2 = 0.69314718055994530942;

std::vector<double> padded(std::span<const double> p, std::size_t size) {
  if (p.size() > size) throw DomainError("cipher: pmf has more entries than messages");
  std::vector<double> out(size, 0.0);
  std::copy(p.begin(), p.end(), out.begin());
  return out;
}

// One cryptogram's contribution sum_m w(m) rank(m)^rho, where w(m) is the
// joint weight of (message m, cryptogram y) summed over keys and ranks order
// the positive weights decreasingly, ties by ascending message index.
template <class Entries>
double ranked_contribution(Entries& entries, std::size_t count, double rho) {
  std::sort(entries.begin(), entries.begin() + static_cast<std::ptrdiff_t>(count),
            [](const auto& a, const auto& b) { return a.first < b.first; });
  // merge duplicate messages
  std::size_t out = 0;
  for (std::size_t i = 0; i < count; ++i) {
    if (out > 0 && entries[out - 1].first == entries[i].first) {
      entries[out - 1].second += entries[i].second;
    } else {
      entries[out++] = entries[i];
    }
  }
  std::stable_sort(entries.begin(), entries.begin() + static_cast<std::ptrdiff_t>(out),
                   [](const auto& a, const auto& b) { return a.second > b.second; });
  double acc = 0.0;
  for (std::size_t r = 0; r < out; ++r) {
    if (entries[r].second <= 0.0) break;
    acc += entries[r].second * std::pow(static_cast<double>(r + 1), rho);
  }
  return acc;
}

std::vector<std::vector<std::uint32_t>> all_permutations(std::size_t n) {
  std::vector<std::uint32_t> perm(n);
  std::iota(perm.begin(), perm.end(), 0u);
  std::vector<std::vector<std::uint32_t>> out;
  do {
    out.push_back(perm);
  } while (std::next_permutation(perm.begin(), perm.end()));
  return out;
}

// Small fixed-capacity evaluator for the exhaustive search.
double small_table_moment(const std::vector<const std::vector<std::uint32_t>*>& keys,
                          std::span<const double> p, double rho) {
  const std::size_t n = p.size();
  const std::size_t m = keys.size();
  std::array<std::array<double, kBruteForceMaxMessages>, kBruteForceMaxMessages> w{};
  for (std::size_t u = 0; u < m; ++u)
    for (std::size_t msg = 0; msg < n; ++msg) w[(*keys[u])[msg]][msg] += p[msg];
  double total = 0.0;
  std::array<std::pair<std::uint32_t, double>, kBruteForceMaxMessages> entries{};
  for (std::size_t y = 0; y < n; ++y) {
    std::size_t count = 0;
    for (std::size_t msg = 0; msg < n; ++msg)
      if (w[y][msg] > 0.0) entries[count++] = {static_cast<std::uint32_t>(msg), w[y][msg]};
    total += ranked_contribution(entries, count, rho);
  }
  return total / static_cast<double>(m);
}

CipherSpec unpadded_spec(unsigned key_bits, std::size_t num_messages) {
  CipherSpec spec = CipherSpec::make(1, key_bits, num_messages);
  spec.num_messages = num_messages;
  return spec;
}

}  // namespace

CipherSpec CipherSpec::make(unsigned n, unsigned key_bits, std::size_t num_real) {
  if (n == 0) throw DomainError("cipher: n must be positive");
  if (key_bits >= 31) throw SizeError("cipher: too many key bits");
  if (num_real == 0) throw DomainError("cipher: empty message set");
  CipherSpec s;
  s.n = n;
  s.key_bits = key_bits;
  s.num_keys = std::size_t{1} << key_bits;
  s.key_rate = key_bits * kLn2 / n;
  s.num_real = num_real;
  s.num_messages = (num_real + s.num_keys - 1) / s.num_keys * s.num_keys;
  return s;
}

unsigned key_bits_for_rate(unsigned n, double rate) {
  if (!(rate > 0.0)) throw DomainError("key rate must be positive");
  const double bits = static_cast<double>(n) * rate / kLn2;
  const double nearest = std::round(bits);
  if (std::abs(bits - nearest) <= 1e-9 * std::max(1.0, nearest))
    return static_cast<unsigned>(nearest);
  return static_cast<unsigned>(std::ceil(bits));
}

Cipher::Cipher(CipherSpec spec, const std::vector<std::vector<std::uint32_t>>& table)
    : spec_(spec) {
  const std::size_t n = spec_.num_messages;
  if (table.size() != spec_.num_keys) throw ValidationError("cipher: one permutation per key");
  if (n * spec_.num_keys > kMaxCipherTableEntries) throw SizeError("cipher: table too large");
  forward_.resize(n * spec_.num_keys);
  inverse_.resize(n * spec_.num_keys);
  for (std::size_t u = 0; u < spec_.num_keys; ++u) {
    if (table[u].size() != n) throw ValidationError("cipher: permutation has the wrong size");
    std::vector<char> seen(n, 0);
    for (std::size_t m = 0; m < n; ++m) {
      const std::uint32_t y = table[u][m];
      if (y >= n || seen[y])
        throw ValidationError("cipher: key " + std::to_string(u) + " is not a bijection");
      seen[y] = 1;
      forward_[u * n + m] = y;
      inverse_[u * n + y] = static_cast<std::uint32_t>(m);
    }
  }
}

std::vector<std::vector<std::uint32_t>> Cipher::table() const {
  const std::size_t n = spec_.num_messages;
  std::vector<std::vector<std::uint32_t>> out(spec_.num_keys);
  for (std::size_t u = 0; u < spec_.num_keys; ++u)
    out[u].assign(forward_.begin() + static_cast<std::ptrdiff_t>(u * n),
                  forward_.begin() + static_cast<std::ptrdiff_t>((u + 1) * n));
  return out;
}

Cipher build_group_xor_cipher(std::span<const double> p, unsigned key_bits, unsigned n) {
  const CipherSpec spec = CipherSpec::make(n, key_bits, p.size());
  const std::size_t total = spec.num_messages;
  const std::size_t m = spec.num_keys;
  if (total * m > kMaxCipherTableEntries) throw SizeError("group-XOR cipher: table too large");

  // position -> message; dummies keep their own index
  std::vector<std::size_t> at_position = sort_desc(p);
  for (std::size_t r = p.size(); r < total; ++r) at_position.push_back(r);

  std::vector<std::vector<std::uint32_t>> table(m, std::vector<std::uint32_t>(total));
  for (std::size_t u = 0; u < m; ++u)
    for (std::size_t r = 0; r < total; ++r) {
      const std::size_t group = r / m;
      const std::size_t offset = r % m;
      table[u][at_position[r]] = static_cast<std::uint32_t>(group * m + (offset ^ u));
    }
  return Cipher(spec, table);
}

GuessOrder optimal_attack(const Cipher& cipher, std::span<const double> p, std::size_t cryptogram) {
  const std::size_t n = cipher.num_messages();
  if (cryptogram >= n) throw DomainError("optimal_attack: cryptogram out of range");
  const auto q = padded(p, n);
  std::vector<double> posterior(n, 0.0);
  for (std::size_t u = 0; u < cipher.num_keys(); ++u) {
    const std::size_t m = cipher.decrypt(cryptogram, u);
    posterior[m] += q[m];
  }
  return GuessOrder::from_sequence(sort_desc(posterior));
}

double attack_moment(const Cipher& cipher, std::span<const double> p, double rho) {
  if (!(rho > 0.0)) throw DomainError("attack_moment: rho must be positive");
  const std::size_t n = cipher.num_messages();
  const std::size_t keys = cipher.num_keys();
  const auto q = padded(p, n);
  const double total = kernels::omp::sum(n, [&](std::size_t y) {
    std::vector<std::pair<std::uint32_t, double>> entries;
    entries.reserve(keys);
    for (std::size_t u = 0; u < keys; ++u) {
      const std::uint32_t m = cipher.decrypt(y, u);
      if (q[m] > 0.0) entries.emplace_back(m, q[m]);
    }
    return ranked_contribution(entries, entries.size(), rho);
  });
  return total / static_cast<double>(keys);
}

double attack_moment_with(const Cipher& cipher, std::span<const double> p, double rho,
                          const std::function<GuessOrder(std::size_t)>& attacker) {
  if (!(rho > 0.0)) throw DomainError("attack_moment: rho must be positive");
  const std::size_t n = cipher.num_messages();
  const auto q = padded(p, n);
  CompensatedSum acc;
  for (std::size_t y = 0; y < n; ++y) {
    const GuessOrder order = attacker(y);
    if (order.size() != n) throw DomainError("attack_moment_with: order has the wrong size");
    for (std::size_t u = 0; u < cipher.num_keys(); ++u) {
      const std::size_t m = cipher.decrypt(y, u);
      if (q[m] > 0.0) acc.add(q[m] * std::pow(static_cast<double>(order.rank(m)), rho));
    }
  }
  return acc.value() / static_cast<double>(cipher.num_keys());
}

double group_xor_moment_closed(std::span<const double> p, unsigned key_bits, double rho) {
  if (!(rho > 0.0)) throw DomainError("group_xor_moment_closed: rho must be positive");
  if (key_bits >= 63) throw SizeError("group_xor_moment_closed: too many key bits");
  const auto order = sort_desc(p);
  const std::size_t m = std::size_t{1} << key_bits;
  return kernels::omp::sum(order.size(), [&](std::size_t r) {
    const double w = p[order[r]];
    return w > 0.0 ? w * std::pow(static_cast<double>(r % m + 1), rho) : 0.0;
  });
}

BruteForceResult brute_force_best_cipher(std::span<const double> p, unsigned key_bits,
                                         double rho) {
  const std::size_t n = p.size();
  if (n == 0 || n > kBruteForceMaxMessages || key_bits > kBruteForceMaxKeyBits)
    throw SizeError("brute_force_best_cipher: requires N <= 5 and k <= 2");
  if (!(rho > 0.0)) throw DomainError("brute_force_best_cipher: rho must be positive");

  const auto perms = all_permutations(n);
  const std::size_t keys = std::size_t{1} << key_bits;
  const std::size_t free_keys = keys - 1;
  const std::size_t np = perms.size();

  struct Best {
    double value = -std::numeric_limits<double>::infinity();
    std::vector<std::size_t> choice;
    std::size_t evaluated = 0;
  };

  // choice[i] indexes perms for key i+1, nondecreasing
  auto search = [&](std::size_t first) {
    Best best;
    std::vector<std::size_t> choice(free_keys, first);
    std::vector<const std::vector<std::uint32_t>*> tables(keys, &perms[0]);
    while (true) {
      for (std::size_t i = 0; i < free_keys; ++i) tables[i + 1] = &perms[choice[i]];
      const double v = small_table_moment(tables, p, rho);
      ++best.evaluated;
      if (v > best.value) {
        best.value = v;
        best.choice = choice;
      }
      // advance the tail (positions 1..) as a nondecreasing tuple
      std::size_t pos = free_keys;
      while (pos > 1 && choice[pos - 1] == np - 1) --pos;
      if (pos <= 1) break;
      const std::size_t next = choice[pos - 1] + 1;
      for (std::size_t i = pos - 1; i < free_keys; ++i) choice[i] = next;
    }
    return best;
  };

  Best overall;
  if (free_keys == 0) {
    std::vector<const std::vector<std::uint32_t>*> tables{&perms[0]};
    overall.value = small_table_moment(tables, p, rho);
    overall.evaluated = 1;
  } else {
    std::vector<Best> partial(np);
    kernels::omp::for_each_index(np, [&](std::size_t first) { partial[first] = search(first); });
    for (auto& b : partial) {
      overall.evaluated += b.evaluated;
      if (b.value > overall.value) {
        overall.value = b.value;
        overall.choice = b.choice;
      }
    }
  }

  std::vector<std::vector<std::uint32_t>> table(keys, perms[0]);
  for (std::size_t i = 0; i < free_keys; ++i) table[i + 1] = perms[overall.choice[i]];
  return {overall.value, Cipher(unpadded_spec(key_bits, n), table), overall.evaluated};
}

void for_each_permutation_cipher(std::size_t num_messages, unsigned key_bits,
                                 const std::function<void(const Cipher&)>& visit) {
  if (num_messages == 0 || num_messages > 4 || key_bits > 1)
    throw SizeError("for_each_permutation_cipher: requires N <= 4 and k <= 1");
  const auto perms = all_permutations(num_messages);
  const std::size_t keys = std::size_t{1} << key_bits;
  const CipherSpec spec = unpadded_spec(key_bits, num_messages);
  std::vector<std::size_t> idx(keys, 0);
  while (true) {
    std::vector<std::vector<std::uint32_t>> table(keys);
    for (std::size_t u = 0; u < keys; ++u) table[u] = perms[idx[u]];
    visit(Cipher(spec, table));
    std::size_t pos = keys;
    while (pos > 0 && idx[pos - 1] == perms.size() - 1) idx[--pos] = 0;
    if (pos == 0) break;
    ++idx[pos - 1];
  }
}

AchievedExponent guessing_exponent_achieved(const SourceModel& model, unsigned n, double rho,
                                            double rate) {
  if (!(rho > 0.0)) throw DomainError("guessing_exponent_achieved: rho must be positive");
  const Pmf p = materialize(model, n);
  AchievedExponent out;
  out.key_bits = key_bits_for_rate(n, rate);
  const CipherSpec spec = CipherSpec::make(n, out.key_bits, p.size());
  double moment_value = 0.0;
  if (spec.num_messages * spec.num_keys <= (std::size_t{1} << 22)) {
    moment_value = attack_moment(build_group_xor_cipher(p.probs(), out.key_bits, n), p.probs(), rho);
  } else {
    moment_value = group_xor_moment_closed(p.probs(), out.key_bits, rho);
    out.closed_form = true;
  }
  out.log_moment = std::log(moment_value);
  out.value = out.log_moment / n;
  out.c_n = harmonic_number(p.size());
  out.group_xor_slack = (rho * std::log(2.0 * out.c_n) + std::log(2.0 + rho)) / n;
  out.equivalence_slack = (rho * std::log(4.0 * out.c_n) + std::log(2.0 + rho)) / n;
  return out;
}

}  // namespace keyguess
