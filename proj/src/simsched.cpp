#include "polarize/simsched.hpp"

#include <array>
#include <charconv>

namespace polarize {

namespace {

bool set_one(Mutations& m, std::string_view name) {
  if (name == "hw-emptiness") {
    m.hw_emptiness = true;
  } else if (name == "ts-skip-startts-guard") {
    m.ts_skip_startts_guard = true;
  } else if (name == "ts-no-scan-edges") {
    m.ts_no_scan_edges = true;
  } else if (name == "set-skip-validation") {
    m.set_skip_validation = true;
  } else if (name == "ts-no-insert-order") {
    m.ts_no_insert_order = true;
  } else if (name == "ts-scan-all-pools") {
    m.ts_scan_all_pools = true;
  } else if (name == "hw-no-insert-order") {
    m.hw_no_insert_order = true;
  } else if (name == "ts-paper") {
    m.ts_no_insert_order = m.ts_scan_all_pools = true;
  } else {
    return false;
  }
  return true;
}

}  // namespace

std::optional<Mutations> mutation_by_name(std::string_view name) {
  Mutations m;
  if (name.empty() || name == "none") return m;
  while (!name.empty()) {
    const auto comma = name.find(',');
    if (!set_one(m, name.substr(0, comma))) return std::nullopt;
    name = comma == std::string_view::npos ? std::string_view{} : name.substr(comma + 1);
  }
  return m;
}

std::vector<std::string_view> mutation_names() {
  return {"hw-emptiness",       "ts-skip-startts-guard", "ts-no-scan-edges", "set-skip-validation",
          "ts-no-insert-order", "ts-scan-all-pools",     "ts-paper",         "hw-no-insert-order"};
}

std::string schedule_to_string(const Schedule& s) {
  std::string out;
  for (const auto& c : s) {
    if (!out.empty()) out += ' ';
    out += std::to_string(c.thread);
    out += '.';
    out += std::to_string(c.branch);
  }
  return out;
}

Schedule parse_schedule(std::string_view text) {
  Schedule out;
  std::size_t i = 0;
  auto skip_ws = [&] {
    while (i < text.size() && (text[i] == ' ' || text[i] == '\t' || text[i] == '\n')) ++i;
  };
  auto number = [&](std::uint32_t& v) {
    const auto* first = text.data() + i;
    const auto [ptr, ec] = std::from_chars(first, text.data() + text.size(), v);
    if (ec != std::errc{} || ptr == first) throw std::invalid_argument("malformed schedule near offset " + std::to_string(i));
    i += static_cast<std::size_t>(ptr - first);
  };
  skip_ws();
  while (i < text.size()) {
    Choice c;
    number(c.thread);
    if (i < text.size() && text[i] == '.') {
      ++i;
      number(c.branch);
    }
    out.push_back(c);
    skip_ws();
  }
  return out;
}

std::optional<Cadence> cadence_by_name(std::string_view name) {
  if (name == "end") return Cadence::End;
  if (name == "on-complete") return Cadence::OnComplete;
  if (name == "paranoid") return Cadence::Paranoid;
  return std::nullopt;
}

std::string_view cadence_name(Cadence c) {
  switch (c) {
    case Cadence::End:
      return "end";
    case Cadence::OnComplete:
      return "on-complete";
    case Cadence::Paranoid:
      return "paranoid";
  }
  return "?";
}

std::string_view run_status_name(RunStatus s) {
  return s == RunStatus::Completed ? "completed" : "bound-exhausted";
}

std::uint64_t run_seed(std::uint64_t seed, std::size_t index) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(index), static_cast<std::uint32_t>(std::uint64_t{index} >> 32)};
  std::array<std::uint32_t, 2> out{};
  seq.generate(out.begin(), out.end());
  return (std::uint64_t{out[0]} << 32) | out[1];
}

}  // namespace polarize
