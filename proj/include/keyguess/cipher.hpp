#pragma once

// The Shannon cipher system at finite n: the group-XOR encryption, the
// posterior-order attacker, exact attack moments, and exhaustive search over
// small permutation ciphers.

#include <cstddef>
#include <cstdint>
#include <functional>
#include <span>
#include <vector>

#include "keyguess/guessing.hpp"
#include "keyguess/sources.hpp"

namespace keyguess {

struct CipherSpec {
  unsigned n = 1;                 // message length in letters
  unsigned key_bits = 0;          // k
  std::size_t num_keys = 1;       // M = 2^k
  double key_rate = 0.0;          // k ln2 / n, nats per letter
  std::size_t num_real = 0;       // messages with a source probability
  std::size_t num_messages = 0;   // after zero-probability padding

  /// Pads num_real up to a multiple of 2^k.
  static CipherSpec make(unsigned n, unsigned key_bits, std::size_t num_real);
};

/// Smallest k with k ln2 >= nR, i.e. ceil(nR / ln 2), robust to rounding
/// when nR / ln 2 is an integer.
unsigned key_bits_for_rate(unsigned n, double rate);

/// Encryption table: for each key u a bijection of {0..N-1}. Messages and
/// cryptograms share the index set. The exhaustive searches use unpadded
/// tables, so N need not be a multiple of M.
class Cipher {
 public:
  Cipher() = default;
  /// `table[u][m]` is the cryptogram of message m under key u.
  Cipher(CipherSpec spec, const std::vector<std::vector<std::uint32_t>>& table);

  const CipherSpec& spec() const noexcept { return spec_; }
  std::size_t num_keys() const noexcept { return spec_.num_keys; }
  std::size_t num_messages() const noexcept { return spec_.num_messages; }
  std::uint32_t encrypt(std::size_t message, std::size_t key) const {
    return forward_[key * spec_.num_messages + message];
  }
  std::uint32_t decrypt(std::size_t cryptogram, std::size_t key) const {
    return inverse_[key * spec_.num_messages + cryptogram];
  }
  std::vector<std::vector<std::uint32_t>> table() const;

 private:
  CipherSpec spec_;
  std::vector<std::uint32_t> forward_;
  std::vector<std::uint32_t> inverse_;
};

inline constexpr std::size_t kMaxCipherTableEntries = std::size_t{1} << 26;

/// Sort messages by decreasing probability, pad to a multiple of M = 2^k with
/// zero-probability dummies, and XOR the low k bits of each sorted position
/// with the key. Cryptogram labels are sorted positions; dummy message m has
/// index m >= p.size().
Cipher build_group_xor_cipher(std::span<const double> p, unsigned key_bits, unsigned n = 1);

/// Guess order over all N messages for cryptogram y, by decreasing posterior
/// with ties (including zero posterior) by ascending index.
GuessOrder optimal_attack(const Cipher& cipher, std::span<const double> p, std::size_t cryptogram);

/// Exact E[G(X|Y)^rho] for the optimal attacker, key uniform over M values.
double attack_moment(const Cipher& cipher, std::span<const double> p, double rho);

/// E[G^rho] for an arbitrary attacker given as cryptogram -> guess order.
double attack_moment_with(const Cipher& cipher, std::span<const double> p, double rho,
                          const std::function<GuessOrder(std::size_t)>& attacker);

/// sum_j sum_i P(jM + i) (i + 1)^rho over the sorted, padded messages.
double group_xor_moment_closed(std::span<const double> p, unsigned key_bits, double rho);

struct BruteForceResult {
  double max_moment = 0.0;
  Cipher witness;
  std::size_t tables_evaluated = 0;
};

inline constexpr std::size_t kBruteForceMaxMessages = 5;
inline constexpr unsigned kBruteForceMaxKeyBits = 2;

/// Exhaustive maximum of attack_moment over per-key permutation tables of the
/// (unpadded) message set. Key 0 is fixed to the identity and the remaining
/// keys range over multisets, which covers every table up to relabelling.
BruteForceResult brute_force_best_cipher(std::span<const double> p, unsigned key_bits, double rho);

/// Calls `visit` on every per-key permutation table of N messages (no
/// symmetry reduction, no padding). Requires N <= 4 and k <= 1.
void for_each_permutation_cipher(std::size_t num_messages, unsigned key_bits,
                                 const std::function<void(const Cipher&)>& visit);

struct AchievedExponent {
  double value = 0.0;            // (1/n) ln E[G^rho] under group-XOR
  double log_moment = 0.0;
  unsigned key_bits = 0;
  double c_n = 0.0;
  double group_xor_slack = 0.0;      // ln((2 c_n)^rho (2 + rho)) / n
  double equivalence_slack = 0.0;  // ln((4 c_n)^rho (2 + rho)) / n
  bool closed_form = false;      // table too large; moment from the closed form
};

AchievedExponent guessing_exponent_achieved(const SourceModel& model, unsigned n, double rho,
                                            double rate);

}  // namespace keyguess
