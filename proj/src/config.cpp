#include "erw/config.hpp"

#include <charconv>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace erw {

namespace {

std::string trim(const std::string& s) {
    const auto first = s.find_first_not_of(" \t\r\n");
    if (first == std::string::npos) return "";
    const auto last = s.find_last_not_of(" \t\r\n");
    return s.substr(first, last - first + 1);
}

double parse_real(const std::string& s, const std::string& key) {
    try {
        std::size_t pos = 0;
        const double v = std::stod(s, &pos);
        if (pos != s.size()) throw std::invalid_argument(s);
        return v;
    } catch (const std::exception&) {
        throw std::invalid_argument("config: bad number '" + s + "' for key " + key);
    }
}

std::int64_t parse_int(const std::string& s, const std::string& key) {
    std::int64_t v = 0;
    const auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc() || p != s.data() + s.size())
        throw std::invalid_argument("config: bad integer '" + s + "' for key " + key);
    return v;
}

std::vector<EnvironmentLaw::Component> parse_environment(const std::string& s) {
    std::vector<EnvironmentLaw::Component> comps;
    std::stringstream byComp(s);
    std::string part;
    while (std::getline(byComp, part, ';')) {
        part = trim(part);
        if (part.empty()) continue;
        const auto colon = part.find(':');
        if (colon == std::string::npos)
            throw std::invalid_argument("config: environment component needs 'weight : probs', got '" + part + "'");
        EnvironmentLaw::Component c;
        c.weight = parse_real(trim(part.substr(0, colon)), "environment");
        std::stringstream probs(part.substr(colon + 1));
        std::string tok;
        while (probs >> tok) c.pile.probs.push_back(parse_real(tok, "environment"));
        if (c.pile.probs.empty())
            throw std::invalid_argument("config: environment component has no cookie probabilities");
        comps.push_back(std::move(c));
    }
    if (comps.empty()) throw std::invalid_argument("config: environment is empty");
    return comps;
}

void format_double(std::ostringstream& os, double v) {
    char buf[32];
    const auto [p, ec] = std::to_chars(buf, buf + sizeof(buf), v);
    (void)ec;
    os.write(buf, p - buf);
}

} // namespace

ExperimentConfig ExperimentConfig::parse_string(const std::string& text) {
    ExperimentConfig cfg;
    bool have_environment = false;
    std::istringstream in(text);
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        const std::string t = trim(line);
        if (t.empty() || t[0] == '#') continue;
        const auto eq = t.find('=');
        if (eq == std::string::npos)
            throw std::invalid_argument("config line " + std::to_string(lineno) + ": expected key = value");
        const std::string key = trim(t.substr(0, eq));
        const std::string value = trim(t.substr(eq + 1));
        if (key == "environment") {
            cfg.environment = parse_environment(value);
            have_environment = true;
        } else if (key == "seed") {
            cfg.seed = static_cast<std::uint64_t>(parse_int(value, key));
        } else if (key == "horizon") {
            cfg.horizon = parse_int(value, key);
        } else if (key == "replicates") {
            cfg.replicates = parse_int(value, key);
        } else if (key == "margin") {
            cfg.margin = parse_int(value, key);
        } else if (key == "guard_level") {
            cfg.guard_level = parse_int(value, key);
        } else if (key == "tail_cut") {
            cfg.tail_cut = parse_real(value, key);
        } else if (key == "confidence") {
            cfg.confidence = parse_real(value, key);
        } else if (key == "output_dir") {
            cfg.output_dir = value;
        } else {
            throw std::invalid_argument("config line " + std::to_string(lineno) + ": unknown key '" + key + "'");
        }
    }
    if (!have_environment) throw std::invalid_argument("config: missing required key 'environment'");
    if (cfg.horizon < 1 || cfg.replicates < 1 || cfg.margin < 0 || cfg.guard_level < 0)
        throw std::invalid_argument("config: numeric fields must be positive (margin/guard >= 0)");
    if (!(cfg.tail_cut > 0.0 && cfg.tail_cut <= 1e-6))
        throw std::invalid_argument("config: tail_cut must lie in (0, 1e-6]");
    if (!(cfg.confidence > 0.0 && cfg.confidence < 1.0))
        throw std::invalid_argument("config: confidence must lie in (0, 1)");
    EnvironmentLaw validate(cfg.environment); // throws with the env module's message
    return cfg;
}

ExperimentConfig ExperimentConfig::parse_file(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw std::invalid_argument("config: cannot open " + path.string());
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse_string(buf.str());
}

std::string ExperimentConfig::canonical() const {
    std::ostringstream os;
    os << "environment=";
    for (std::size_t i = 0; i < environment.size(); ++i) {
        if (i) os << ';';
        format_double(os, environment[i].weight);
        os << ':';
        for (std::size_t j = 0; j < environment[i].pile.probs.size(); ++j) {
            if (j) os << ',';
            format_double(os, environment[i].pile.probs[j]);
        }
    }
    os << "|seed=" << seed << "|horizon=" << horizon << "|replicates=" << replicates
       << "|margin=" << margin << "|guard_level=" << guard_level << "|tail_cut=";
    format_double(os, tail_cut);
    os << "|confidence=";
    format_double(os, confidence);
    return os.str();
}

std::uint64_t ExperimentConfig::hash() const {
    const std::string c = canonical();
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char ch : c) {
        h ^= ch;
        h *= 0x100000001b3ULL;
    }
    return h;
}

std::string ExperimentConfig::header_line() const {
    std::ostringstream os;
    os << "# " << kToolVersion << " config=" << std::hex << hash() << std::dec << " seed=" << seed;
    return os.str();
}

} // namespace erw
