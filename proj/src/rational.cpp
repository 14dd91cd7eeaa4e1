#include "rational.hpp"

#include <cctype>

namespace nlslab {

namespace {
std::int64_t parse_int(const std::string& s) {
    std::size_t pos = 0;
    long long v = std::stoll(s, &pos);
    if (pos != s.size()) throw std::invalid_argument("bad integer: " + s);
    return v;
}
}  // namespace

Rational parse_rational(const std::string& raw) {
    std::string s;
    for (char ch : raw)
        if (!std::isspace(static_cast<unsigned char>(ch))) s.push_back(ch);
    if (s.empty()) throw std::invalid_argument("empty rational");
    auto slash = s.find('/');
    if (slash != std::string::npos)
        return Rational(parse_int(s.substr(0, slash)), parse_int(s.substr(slash + 1)));
    auto dot = s.find('.');
    if (dot == std::string::npos) return Rational(parse_int(s));
    bool neg = s[0] == '-';
    std::string ip = s.substr(neg ? 1 : 0, dot - (neg ? 1 : 0));
    std::string fp = s.substr(dot + 1);
    if (fp.size() > 17) throw std::invalid_argument("too many decimals: " + s);
    for (char ch : ip + fp)
        if (!std::isdigit(static_cast<unsigned char>(ch))) throw std::invalid_argument("bad decimal: " + s);
    std::int64_t den = 1;
    for (std::size_t i = 0; i < fp.size(); ++i) den *= 10;
    std::int64_t num = (ip.empty() ? 0 : parse_int(ip)) * den + (fp.empty() ? 0 : parse_int(fp));
    return Rational(neg ? -num : num, den);
}

}  // namespace nlslab
