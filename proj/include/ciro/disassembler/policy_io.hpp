#pragma once

// Versioned binary policy files.
//
//   magic   "CIROQ1"            6 bytes
//   version u32                 currently 1
//   task    u8                  TaskKind
//   hyper   5 x f64             learning rate, discount, epsilon start/end/decay fraction
//   count   u64
//   entries count x (u64 key, 6 x f64 action values), sorted by key
//
// All integers and doubles are little-endian.

#include <algorithm>
#include <array>
#include <bit>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <istream>
#include <ostream>
#include <string>
#include <string_view>
#include <vector>

#include "ciro/disassembler/qlearning.hpp"
#include "ciro/error.hpp"

namespace ciro::disassembly {

inline constexpr std::string_view kPolicyMagic = "CIROQ1";
inline constexpr std::uint32_t kPolicyVersion = 1;

namespace detail {

inline void put_u64(std::ostream& out, std::uint64_t v, int bytes = 8) {
  for (int b = 0; b < bytes; ++b) out.put(static_cast<char>((v >> (8 * b)) & 0xff));
}

inline void put_f64(std::ostream& out, double v) { put_u64(out, std::bit_cast<std::uint64_t>(v)); }

inline std::uint64_t get_u64(std::istream& in, int bytes = 8) {
  std::uint64_t v = 0;
  for (int b = 0; b < bytes; ++b) {
    const int c = in.get();
    if (c == std::char_traits<char>::eof()) throw Error(ErrorCode::PolicyFormat, "truncated policy file");
    v |= static_cast<std::uint64_t>(static_cast<unsigned char>(c)) << (8 * b);
  }
  return v;
}

inline double get_f64(std::istream& in) { return std::bit_cast<double>(get_u64(in)); }

}  // namespace detail

inline void save_policy(std::ostream& out, const QPolicy& policy) {
  out.write(kPolicyMagic.data(), static_cast<std::streamsize>(kPolicyMagic.size()));
  detail::put_u64(out, kPolicyVersion, 4);
  detail::put_u64(out, static_cast<std::uint64_t>(policy.task), 1);
  for (double v : {policy.learning_rate, policy.discount, policy.epsilon_start, policy.epsilon_end,
                   policy.epsilon_decay_fraction}) {
    detail::put_f64(out, v);
  }
  std::vector<std::uint64_t> keys;
  keys.reserve(policy.table.size());
  for (const auto& [key, values] : policy.table) keys.push_back(key);
  std::sort(keys.begin(), keys.end());
  detail::put_u64(out, keys.size());
  for (std::uint64_t key : keys) {
    detail::put_u64(out, key);
    for (double v : policy.table.at(key)) detail::put_f64(out, v);
  }
}

inline QPolicy load_policy(std::istream& in) {
  std::array<char, 6> magic{};
  in.read(magic.data(), magic.size());
  if (in.gcount() != static_cast<std::streamsize>(magic.size()) ||
      std::string_view(magic.data(), magic.size()) != kPolicyMagic) {
    throw Error(ErrorCode::PolicyFormat, "missing CIROQ1 header");
  }
  const auto version = detail::get_u64(in, 4);
  if (version != kPolicyVersion) {
    throw Error(ErrorCode::PolicyFormat, "unsupported policy version " + std::to_string(version));
  }
  QPolicy p;
  const auto task = detail::get_u64(in, 1);
  if (task >= kAllTasks.size()) throw Error(ErrorCode::PolicyFormat, "unknown task id");
  p.task = static_cast<TaskKind>(task);
  p.learning_rate = detail::get_f64(in);
  p.discount = detail::get_f64(in);
  p.epsilon_start = detail::get_f64(in);
  p.epsilon_end = detail::get_f64(in);
  p.epsilon_decay_fraction = detail::get_f64(in);
  const std::uint64_t count = detail::get_u64(in);
  p.table.reserve(count);
  for (std::uint64_t n = 0; n < count; ++n) {
    const std::uint64_t key = detail::get_u64(in);
    ActionValues values;
    for (double& v : values) v = detail::get_f64(in);
    p.table.emplace(key, values);
  }
  if (in.peek() != std::char_traits<char>::eof()) throw Error(ErrorCode::PolicyFormat, "trailing bytes");
  return p;
}

inline void save_policy(const std::string& path, const QPolicy& policy) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorCode::ParseError, "cannot write " + path);
  save_policy(out, policy);
}

inline QPolicy load_policy(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::ParseError, "cannot read " + path);
  return load_policy(in);
}

}  // namespace ciro::disassembly
