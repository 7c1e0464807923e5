#include "opalg/scalar.hpp"

namespace opalg {
namespace detail {

std::string rat_str(const mpq_class& q) {
  std::string s = q.get_str();
  if (s.find('/') == std::string::npos) s += "/1";
  return s;
}

mpq_class parse_rat(const std::string& s) {
  if (s.empty()) throw ParseError("empty rational");
  for (char c : s) {
    if (!(std::isdigit(static_cast<unsigned char>(c)) || c == '/' || c == '-' || c == '+'))
      throw ParseError("bad rational: " + s);
  }
  mpq_class q;
  if (q.set_str(s, 10) != 0) throw ParseError("bad rational: " + s);
  if (q.get_den() == 0) throw ParseError("zero denominator: " + s);
  q.canonicalize();
  return q;
}

}  // namespace detail

std::string GaussianRational::str() const {
  std::string s = detail::rat_str(re_);
  if (im_ >= 0)
    s += "+" + detail::rat_str(im_);
  else
    s += "-" + detail::rat_str(-im_);
  return s + " i";
}

GaussianRational GaussianRational::parse(const std::string& input) {
  std::string s;
  s.reserve(input.size());
  for (char c : input)
    if (!std::isspace(static_cast<unsigned char>(c))) s.push_back(c);
  bool has_i = !s.empty() && s.back() == 'i';
  if (has_i) s.pop_back();
  if (s.empty()) throw ParseError("bad scalar: " + input);

  if (!has_i) return {detail::parse_rat(s), mpq_class(0)};

  // Split at the last '+' or '-' that starts the imaginary part.
  size_t split = std::string::npos;
  for (size_t k = s.size(); k-- > 1;) {
    if (s[k] == '+' || s[k] == '-') {
      if (s[k - 1] == '/' || s[k - 1] == '+' || s[k - 1] == '-') continue;
      split = k;
      break;
    }
  }
  if (split == std::string::npos) {
    // Pure imaginary, e.g. "3/4i".
    return {mpq_class(0), detail::parse_rat(s)};
  }
  mpq_class re = detail::parse_rat(s.substr(0, split));
  mpq_class im = detail::parse_rat(s.substr(split + 1));
  if (s[split] == '-') im = -im;
  return {re, im};
}

}  // namespace opalg
