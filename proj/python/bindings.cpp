#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <optional>
#include <string>
#include <vector>

#include "chabauty/group.hpp"
#include "chabauty/laurent.hpp"
#include "chabauty/padic_functions.hpp"
#include "chabauty/tables.hpp"
#include "chabauty/tree.hpp"

namespace py = pybind11;
using namespace chabauty;

namespace {

using Grid = std::vector<std::vector<std::string>>;

std::optional<mpq_class> rational(const std::optional<std::string>& text) {
  if (!text) return std::nullopt;
  mpq_class q;
  if (q.set_str(*text, 10) != 0) throw Error(Errc::ParseError, "not a rational: '" + *text + "'");
  q.canonicalize();
  return q;
}

std::vector<Grid> basis_strings(const Subspace& s) {
  std::vector<Grid> out;
  for (const auto& m : s.basis_matrices()) out.push_back(m.to_strings());
  return out;
}

py::dict limit_report(const Context& ctx, const AlgebraFamily& af, const std::optional<Subspace>& expected) {
  const Subspace lim = grassmann_limit(af);
  py::dict d;
  d["basis"] = basis_strings(lim);
  d["dimension"] = lim.dim();
  d["abelian"] = is_abelian_algebra(lim);
  const OracleResult orc = numeric_limit_oracle(af, {6, 7, 8, 9, 10});
  d["oracle_digits"] = orc.certified_digits;
  d["oracle_agreement"] = std::min<long>(lim.agreement(orc.limit), ctx->precision());
  if (expected) d["matches_family_algebra"] = lim.equals(*expected);
  return d;
}

// Elements of Q_p bound with their context.
struct Padic {
  PadicNumber value;
  static Padic make(long p, const std::string& text, int precision) {
    return {PadicNumber::parse(PrimeContext::make(p, precision), text)};
  }
};

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "p-adic Chabauty limits of Cartan subgroups";
  py::register_exception<Error>(m, "ChabautyError", PyExc_ValueError);

  py::class_<Padic>(m, "Padic")
      .def(py::init(&Padic::make), py::arg("p"), py::arg("text"), py::arg("precision") = 32)
      .def("valuation", [](const Padic& x) { return x.value.valuation(); })
      .def("is_exact", [](const Padic& x) { return x.value.is_exact(); })
      .def("inverse", [](const Padic& x) { return Padic{x.value.inv()}; })
      .def("__add__", [](const Padic& a, const Padic& b) { return Padic{a.value + b.value}; })
      .def("__sub__", [](const Padic& a, const Padic& b) { return Padic{a.value - b.value}; })
      .def("__mul__", [](const Padic& a, const Padic& b) { return Padic{a.value * b.value}; })
      .def("__truediv__", [](const Padic& a, const Padic& b) { return Padic{a.value / b.value}; })
      .def("__neg__", [](const Padic& a) { return Padic{-a.value}; })
      .def("__eq__", [](const Padic& a, const Padic& b) { return a.value.equals_to_precision(b.value); })
      .def("__str__", [](const Padic& a) { return a.value.to_string(); })
      .def("__repr__", [](const Padic& a) { return "Padic(" + a.value.to_string() + ")"; });

  m.def("count_power_classes", &count_power_classes, py::arg("p"), py::arg("k"),
        "Order of Q_p^* / (Q_p^*)^k.");

  m.def("preset_names", &preset_names);

  m.def(
      "limit_preset",
      [](const std::string& name, std::optional<std::string> param, long p, int precision) {
        const Context ctx = PrimeContext::make(p, precision);
        const LimitFamilySpec spec = preset(name, rational(param));
        return limit_report(ctx, family_limit_problem(ctx, spec), family_algebra(ctx, spec));
      },
      py::arg("name"), py::arg("param") = std::nullopt, py::arg("p") = 5, py::arg("precision") = 32);

  m.def(
      "limit_family",
      [](const Grid& conjugator, long p, int precision) {
        const Context ctx = PrimeContext::make(p, precision);
        const LaurentFamily fam = LaurentFamily::parse(ctx, conjugator);
        return limit_report(ctx, conjugate_family(cartan_algebra(ctx, fam.size()), fam), std::nullopt);
      },
      py::arg("conjugator"), py::arg("p") = 5, py::arg("precision") = 32,
      "Limit of the conjugated diagonal Cartan algebra; entries are Laurent polynomials in s.");

  m.def(
      "verify_table",
      [](int n, long p, int precision, unsigned long long seed) {
        TableOptions opts;
        opts.seed = seed;
        const TableReport rep = verify_table(PrimeContext::make(p, precision), n, opts);
        py::list fams;
        for (const auto& f : rep.families) {
          py::dict d;
          d["name"] = f.name;
          d["passed"] = f.passed;
          d["blocks"] = f.blocks;
          d["flatness_defect"] = f.flatness;
          d["oracle_agreement"] = f.oracle_agreement;
          fams.append(d);
        }
        py::dict d;
        d["families"] = fams;
        d["classes"] = rep.classes;
        d["expected_classes"] = rep.expected_classes;
        d["upper_bound"] = rep.upper_bound;
        d["separated"] = rep.separated;
        d["passed"] = rep.passed;
        return d;
      },
      py::arg("n"), py::arg("p"), py::arg("precision") = 32, py::arg("seed") = 1);

  m.def(
      "classify",
      [](const Grid& matrix, long p, int precision) {
        return to_string(classify_isometry(PMatrix::parse(PrimeContext::make(p, precision), matrix)));
      },
      py::arg("matrix"), py::arg("p"), py::arg("precision") = 32);

  m.def(
      "conjugacy",
      [](const std::string& first, std::optional<std::string> param1, const std::string& second,
         std::optional<std::string> param2, long p) {
        const Context ctx = PrimeContext::make(p, 32);
        const InvariantResult r = conjugacy_invariant(ctx, preset(first, rational(param1)), preset(second, rational(param2)));
        py::dict d;
        d["verdict"] = to_string(r.verdict);
        d["reason"] = r.reason;
        d["conjugator_verified"] = r.conjugator_verified;
        return d;
      },
      py::arg("first"), py::arg("param1"), py::arg("second"), py::arg("param2"), py::arg("p"));

  m.def(
      "translation_length",
      [](const Grid& matrix, long p, bool ball) {
        const PMatrix g = PMatrix::parse(PrimeContext::make(p, 32), matrix);
        return ball ? translation_length_by_ball(g) : translation_length(g);
      },
      py::arg("matrix"), py::arg("p"), py::arg("ball") = false);

  m.def(
      "cross_ratio_class",
      [](const std::string& alpha, long p) {
        std::vector<std::string> out;
        for (const auto& b : cross_ratio_class(PadicNumber::parse(PrimeContext::make(p, 32), alpha)))
          out.push_back(b.to_string());
        return out;
      },
      py::arg("alpha"), py::arg("p"));

  m.def(
      "orbit_dimension",
      [](const std::string& alpha, const std::vector<std::string>& x, long p) {
        const Context ctx = PrimeContext::make(p, 32);
        Vec v;
        for (const auto& s : x) v.push_back(PadicNumber::parse(ctx, s));
        return orbit_dimension(PadicNumber::parse(ctx, alpha), v);
      },
      py::arg("alpha"), py::arg("x"), py::arg("p"));
}
