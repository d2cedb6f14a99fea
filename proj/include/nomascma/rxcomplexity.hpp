#ifndef NOMASCMA_RXCOMPLEXITY_HPP
#define NOMASCMA_RXCOMPLEXITY_HPP

#include <algorithm>
#include <cstdint>
#include <iomanip>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "nomascma/checked_math.hpp"

// Operation-count models for the two receivers: SIC with an MMSE stage for
// NOMA and message passing for SCMA.
namespace nomascma::rx {

/// SIC receiver: (L_T^3 + 2 L_T^2) * G * (L_T - 1).
inline std::uint64_t sic_complexity(std::uint64_t L_T, std::uint64_t G) {
  if (L_T < 1 || G < 1) throw std::invalid_argument("sic_complexity: L_T and G must be >= 1");
  const std::uint64_t per_stage = checked_add(checked_pow(L_T, 3), checked_mul(2, checked_pow(L_T, 2)));
  return checked_mul(checked_mul(per_stage, G), L_T - 1);
}

/// MPA receiver: I_T * |pi|^d.
inline std::uint64_t mpa_complexity(std::uint64_t pi_size, std::uint64_t d, std::uint64_t I_T) {
  if (pi_size < 1 || d < 1 || I_T < 1) throw std::invalid_argument("mpa_complexity: arguments must be >= 1");
  return checked_mul(I_T, checked_pow(pi_size, d));
}

struct ComplexityParams {
  std::uint64_t N = 8;
  std::uint64_t d = 3;
  std::uint64_t U = 2;
  std::uint64_t L_T = 3;
  std::uint64_t G = 4;
  std::uint64_t I_T = 3;
  std::uint64_t pi_size = 0;  // 0 derives C(N, U)

  std::uint64_t codebook_count() const {
    if (pi_size > 0) return pi_size;
    if (U < 1 || U > N) throw std::invalid_argument("ComplexityParams: need 1 <= U <= N");
    return binomial(N, U);
  }
};

/// A row as printed in a published table, to audit against the formulas.
struct PrintedRow {
  ComplexityParams params;
  std::optional<std::uint64_t> sic;
  std::optional<std::uint64_t> mpa;
};

struct ComplexityRow {
  ComplexityParams params;
  std::uint64_t pi_size = 0;
  std::uint64_t sic = 0;
  std::uint64_t mpa = 0;
  std::optional<std::uint64_t> printed_sic;
  std::optional<std::uint64_t> printed_mpa;
  std::vector<std::string> notes;  // one per disagreement with the printed value

  bool sic_matches() const { return !printed_sic || *printed_sic == sic; }
  bool mpa_matches() const { return !printed_mpa || *printed_mpa == mpa; }
  std::size_t discrepancies() const { return notes.size(); }
};

namespace detail {

inline std::string sic_note(const ComplexityParams& p, std::uint64_t computed, std::uint64_t printed) {
  std::ostringstream os;
  os << "SIC: formula gives " << computed << ", printed " << printed;
  const std::uint64_t per_stage = checked_add(checked_pow(p.L_T, 3), checked_mul(2, checked_pow(p.L_T, 2)));
  if (checked_mul(checked_mul(per_stage, p.G), p.L_T) == printed) os << " (matches a factor L_T instead of L_T - 1)";
  return os.str();
}

inline std::string mpa_note(const ComplexityParams& p, std::uint64_t pi, std::uint64_t computed, std::uint64_t printed) {
  std::ostringstream os;
  os << "MPA: formula gives " << computed << " at d = " << p.d << ", printed " << printed;
  for (std::uint64_t d = 1; d <= p.d + 1; ++d) {
    if (d == p.d) continue;
    try {
      if (mpa_complexity(pi, d, p.I_T) == printed) {
        os << " (matches d = " << d << ")";
        break;
      }
    } catch (const std::overflow_error&) {
    }
  }
  return os.str();
}

}  // namespace detail

inline ComplexityRow evaluate_row(const PrintedRow& in) {
  ComplexityRow r;
  r.params = in.params;
  r.pi_size = in.params.codebook_count();
  r.sic = sic_complexity(in.params.L_T, in.params.G);
  r.mpa = mpa_complexity(r.pi_size, in.params.d, in.params.I_T);
  r.printed_sic = in.sic;
  r.printed_mpa = in.mpa;
  if (!r.sic_matches()) r.notes.push_back(detail::sic_note(in.params, r.sic, *in.sic));
  if (!r.mpa_matches()) r.notes.push_back(detail::mpa_note(in.params, r.pi_size, r.mpa, *in.mpa));
  return r;
}

/// Formula values for every row, with a note wherever a printed value differs.
inline std::vector<ComplexityRow> complexity_table(const std::vector<PrintedRow>& rows) {
  std::vector<ComplexityRow> out;
  out.reserve(rows.size());
  for (const auto& r : rows) out.push_back(evaluate_row(r));
  return out;
}

/// The two published example rows. I_T is not printed; 3 reproduces row 1.
inline std::vector<PrintedRow> published_rows() {
  return {
      {{8, 3, 2, 3, 4, 3, 0}, 360, 65856},
      {{10, 4, 3, 4, 5, 3, 0}, 1920, 5184000},
  };
}

inline std::string to_csv(const std::vector<ComplexityRow>& rows) {
  std::ostringstream os;
  os << "N,d,U,L_T,G,I_T,pi_size,sic_ops,mpa_ops,printed_sic,printed_mpa,notes\n";
  for (const auto& r : rows) {
    const auto& p = r.params;
    os << p.N << ',' << p.d << ',' << p.U << ',' << p.L_T << ',' << p.G << ',' << p.I_T << ',' << r.pi_size << ','
       << r.sic << ',' << r.mpa << ',';
    if (r.printed_sic) os << *r.printed_sic;
    os << ',';
    if (r.printed_mpa) os << *r.printed_mpa;
    os << ",\"";
    for (std::size_t k = 0; k < r.notes.size(); ++k) os << (k ? "; " : "") << r.notes[k];
    os << "\"\n";
  }
  return os.str();
}

inline std::string to_text(const std::vector<ComplexityRow>& rows) {
  const std::vector<std::string> head{"N", "d", "U", "L_T", "G", "I_T", "|pi|", "SIC ops", "MPA ops", "printed SIC",
                                      "printed MPA"};
  std::vector<std::vector<std::string>> cells;
  for (const auto& r : rows) {
    const auto& p = r.params;
    auto opt = [](const std::optional<std::uint64_t>& v) { return v ? std::to_string(*v) : std::string("-"); };
    cells.push_back({std::to_string(p.N), std::to_string(p.d), std::to_string(p.U), std::to_string(p.L_T),
                     std::to_string(p.G), std::to_string(p.I_T), std::to_string(r.pi_size), std::to_string(r.sic),
                     std::to_string(r.mpa), opt(r.printed_sic), opt(r.printed_mpa)});
  }
  std::vector<std::size_t> width(head.size());
  for (std::size_t c = 0; c < head.size(); ++c) {
    width[c] = head[c].size();
    for (const auto& row : cells) width[c] = std::max(width[c], row[c].size());
  }
  std::ostringstream os;
  auto line = [&](const std::vector<std::string>& row) {
    for (std::size_t c = 0; c < row.size(); ++c) os << (c ? "  " : "") << std::setw(static_cast<int>(width[c])) << row[c];
    os << '\n';
  };
  line(head);
  for (std::size_t k = 0; k < cells.size(); ++k) {
    line(cells[k]);
    for (const auto& n : rows[k].notes) os << "    ! " << n << '\n';
  }
  return os.str();
}

}  // namespace nomascma::rx

#endif  // NOMASCMA_RXCOMPLEXITY_HPP
