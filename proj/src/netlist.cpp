#include "lockbreak/netlist.hpp"
#include "lockbreak/runtime.hpp"

#include <algorithm>
#include <cctype>
#include <functional>
#include <queue>
#include <random>
#include <sstream>
#include <unordered_set>

namespace lockbreak {

namespace {

std::string upper(std::string_view s) {
    std::string out(s);
    for (auto& ch : out) ch = static_cast<char>(std::toupper(static_cast<unsigned char>(ch)));
    return out;
}

bool is_name_char(char ch) {
    return std::isalnum(static_cast<unsigned char>(ch)) != 0 || ch == '_';
}

std::string describe(NetlistError::Kind kind) {
    switch (kind) {
        case NetlistError::Kind::Syntax: return "syntax error";
        case NetlistError::Kind::UndeclaredSignal: return "undeclared signal";
        case NetlistError::Kind::DuplicateDriver: return "duplicate driver";
        case NetlistError::Kind::Cycle: return "combinational cycle";
        case NetlistError::Kind::Arity: return "arity violation";
        case NetlistError::Kind::UndrivenOutput: return "undriven output";
    }
    return "netlist error";
}

std::string format_message(NetlistError::Kind kind, const std::string& signal,
                           const std::string& message, std::size_t line, std::size_t column) {
    std::ostringstream os;
    if (line > 0) os << line << ':' << column << ": ";
    os << describe(kind);
    if (!signal.empty()) os << " '" << signal << "'";
    if (!message.empty()) os << ": " << message;
    return os.str();
}

// Kahn's algorithm with a min-heap so ties resolve by declaration index.
// On a cycle, throws with the signal names of one cycle.
TopoOrder compute_topo(const std::vector<Gate>& gates,
                       const std::unordered_map<std::string, std::size_t>& driver_index) {
    const std::size_t n = gates.size();
    std::vector<std::size_t> pending(n, 0);
    std::vector<std::vector<std::size_t>> consumers(n);
    for (std::size_t g = 0; g < n; ++g) {
        for (const auto& in : gates[g].fanin) {
            auto it = driver_index.find(in);
            if (it == driver_index.end()) continue;
            ++pending[g];
            consumers[it->second].push_back(g);
        }
    }
    std::priority_queue<std::size_t, std::vector<std::size_t>, std::greater<>> ready;
    for (std::size_t g = 0; g < n; ++g)
        if (pending[g] == 0) ready.push(g);

    TopoOrder order;
    order.gates.reserve(n);
    while (!ready.empty()) {
        const std::size_t g = ready.top();
        ready.pop();
        order.gates.push_back(g);
        for (std::size_t c : consumers[g])
            if (--pending[c] == 0) ready.push(c);
    }
    if (order.gates.size() == n) return order;

    // Walk backwards through unresolved drivers until a gate repeats.
    std::size_t start = 0;
    while (pending[start] == 0) ++start;
    std::vector<std::size_t> path;
    std::unordered_map<std::size_t, std::size_t> seen_at;
    std::size_t cur = start;
    while (!seen_at.contains(cur)) {
        seen_at[cur] = path.size();
        path.push_back(cur);
        for (const auto& in : gates[cur].fanin) {
            auto it = driver_index.find(in);
            if (it != driver_index.end() && pending[it->second] != 0) {
                cur = it->second;
                break;
            }
        }
    }
    std::string cycle;
    for (std::size_t i = seen_at[cur]; i < path.size(); ++i) {
        if (!cycle.empty()) cycle += " <- ";
        cycle += gates[path[i]].output;
    }
    throw NetlistError(NetlistError::Kind::Cycle, gates[cur].output, "cycle " + cycle);
}

}  // namespace

std::string_view to_string(GateKind kind) {
    switch (kind) {
        case GateKind::And: return "AND";
        case GateKind::Nand: return "NAND";
        case GateKind::Or: return "OR";
        case GateKind::Nor: return "NOR";
        case GateKind::Xor: return "XOR";
        case GateKind::Xnor: return "XNOR";
        case GateKind::Not: return "NOT";
        case GateKind::Buf: return "BUF";
    }
    return "?";
}

std::optional<GateKind> gate_kind_from_string(std::string_view keyword) {
    const std::string k = upper(keyword);
    if (k == "AND") return GateKind::And;
    if (k == "NAND") return GateKind::Nand;
    if (k == "OR") return GateKind::Or;
    if (k == "NOR") return GateKind::Nor;
    if (k == "XOR") return GateKind::Xor;
    if (k == "XNOR") return GateKind::Xnor;
    if (k == "NOT") return GateKind::Not;
    if (k == "BUF" || k == "BUFF") return GateKind::Buf;
    return std::nullopt;
}

bool arity_ok(GateKind kind, std::size_t fanin_count) {
    switch (kind) {
        case GateKind::Not:
        case GateKind::Buf: return fanin_count == 1;
        case GateKind::Xor:
        case GateKind::Xnor: return fanin_count == 2;
        default: return fanin_count >= 2;
    }
}

NetlistError::NetlistError(Kind kind, std::string signal, const std::string& message,
                           std::size_t line, std::size_t column)
    : Error("netlist", format_message(kind, signal, message, line, column)),
      kind_(kind),
      signal_(std::move(signal)),
      detail_(message),
      line_(line),
      column_(column) {}

Netlist::Netlist(std::string name, std::vector<std::string> inputs,
                 std::vector<std::string> outputs, std::vector<Gate> gates)
    : name_(std::move(name)),
      inputs_(std::move(inputs)),
      outputs_(std::move(outputs)),
      gates_(std::move(gates)) {
    using K = NetlistError::Kind;
    for (std::size_t i = 0; i < inputs_.size(); ++i) {
        if (!input_index_.emplace(inputs_[i], i).second)
            throw NetlistError(K::DuplicateDriver, inputs_[i], "input declared twice");
    }
    for (std::size_t g = 0; g < gates_.size(); ++g) {
        const auto& out = gates_[g].output;
        if (input_index_.contains(out))
            throw NetlistError(K::DuplicateDriver, out, "gate drives a primary input");
        if (!driver_index_.emplace(out, g).second)
            throw NetlistError(K::DuplicateDriver, out, "signal driven by two gates");
    }
    for (const auto& gate : gates_) {
        if (!arity_ok(gate.kind, gate.fanin.size())) {
            throw NetlistError(K::Arity, gate.output,
                               std::string(to_string(gate.kind)) + " with " +
                                   std::to_string(gate.fanin.size()) + " fan-in(s)");
        }
        for (const auto& in : gate.fanin) {
            if (!input_index_.contains(in) && !driver_index_.contains(in))
                throw NetlistError(K::UndeclaredSignal, in, "used by '" + gate.output + "'");
        }
    }
    std::unordered_set<std::string> taps;
    for (const auto& out : outputs_) {
        if (!taps.insert(out).second)
            throw NetlistError(K::DuplicateDriver, out, "output declared twice");
        if (!input_index_.contains(out) && !driver_index_.contains(out))
            throw NetlistError(K::UndrivenOutput, out, "no input or gate drives it");
    }
    topo_ = compute_topo(gates_, driver_index_);
}

bool Netlist::is_input(std::string_view signal) const {
    return input_index_.contains(std::string(signal));
}

std::optional<std::size_t> Netlist::driver(std::string_view signal) const {
    auto it = driver_index_.find(std::string(signal));
    if (it == driver_index_.end()) return std::nullopt;
    return it->second;
}

std::optional<std::size_t> Netlist::input_index(std::string_view signal) const {
    auto it = input_index_.find(std::string(signal));
    if (it == input_index_.end()) return std::nullopt;
    return it->second;
}

// ---------------------------------------------------------------------------
// Bench parsing

namespace {

struct Token {
    enum Type { Name, LParen, RParen, Comma, Equals } type;
    std::string text;
    std::size_t column;
};

struct Position {
    std::size_t line;
    std::size_t column;
};

std::vector<Token> tokenize(std::string_view line, std::size_t line_no) {
    std::vector<Token> tokens;
    std::size_t i = 0;
    while (i < line.size()) {
        const char ch = line[i];
        if (ch == ' ' || ch == '\t' || ch == '\r' || ch == '\f' || ch == '\v') {
            ++i;
        } else if (is_name_char(ch)) {
            const std::size_t start = i;
            while (i < line.size() && is_name_char(line[i])) ++i;
            tokens.push_back({Token::Name, std::string(line.substr(start, i - start)), start + 1});
        } else {
            Token::Type type;
            switch (ch) {
                case '(': type = Token::LParen; break;
                case ')': type = Token::RParen; break;
                case ',': type = Token::Comma; break;
                case '=': type = Token::Equals; break;
                default:
                    throw NetlistError(NetlistError::Kind::Syntax, "",
                                       std::string("unexpected character '") + ch + "'", line_no,
                                       i + 1);
            }
            tokens.push_back({type, std::string(1, ch), i + 1});
            ++i;
        }
    }
    return tokens;
}

class LineParser {
public:
    LineParser(const std::vector<Token>& tokens, std::size_t line_no, std::size_t line_len)
        : tokens_(tokens), line_(line_no), end_column_(line_len + 1) {}

    const Token& expect(Token::Type type, const char* what) {
        if (pos_ >= tokens_.size())
            throw NetlistError(NetlistError::Kind::Syntax, "",
                               std::string("expected ") + what + " before end of line", line_,
                               end_column_);
        const Token& tok = tokens_[pos_];
        if (tok.type != type)
            throw NetlistError(NetlistError::Kind::Syntax, "",
                               std::string("expected ") + what + ", found '" + tok.text + "'",
                               line_, tok.column);
        ++pos_;
        return tok;
    }

    [[nodiscard]] bool at(Token::Type type) const {
        return pos_ < tokens_.size() && tokens_[pos_].type == type;
    }

    void expect_end() const {
        if (pos_ < tokens_.size())
            throw NetlistError(NetlistError::Kind::Syntax, "",
                               "trailing '" + tokens_[pos_].text + "'", line_,
                               tokens_[pos_].column);
    }

private:
    const std::vector<Token>& tokens_;
    std::size_t pos_ = 0;
    std::size_t line_;
    std::size_t end_column_;
};

}  // namespace

Netlist parse_bench(std::string_view text, std::string name) {
    std::vector<std::string> inputs;
    std::vector<std::string> outputs;
    std::vector<Gate> gates;
    std::unordered_map<std::string, Position> definition;
    std::unordered_map<std::string, Position> first_use;

    std::size_t line_no = 0;
    std::size_t start = 0;
    while (start <= text.size()) {
        std::size_t end = text.find('\n', start);
        if (end == std::string_view::npos) end = text.size();
        std::string_view line = text.substr(start, end - start);
        ++line_no;
        start = end + 1;

        if (auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
        const auto tokens = tokenize(line, line_no);
        if (tokens.empty()) continue;

        LineParser p(tokens, line_no, line.size());
        const Token& head = p.expect(Token::Name, "signal name or INPUT/OUTPUT");
        const std::string keyword = upper(head.text);
        if (p.at(Token::LParen) && (keyword == "INPUT" || keyword == "OUTPUT")) {
            p.expect(Token::LParen, "'('");
            const Token& sig = p.expect(Token::Name, "signal name");
            p.expect(Token::RParen, "')'");
            p.expect_end();
            if (keyword == "INPUT") {
                inputs.push_back(sig.text);
                definition[sig.text] = {line_no, sig.column};
            } else {
                outputs.push_back(sig.text);
                first_use.try_emplace(sig.text, Position{line_no, sig.column});
            }
            continue;
        }
        p.expect(Token::Equals, "'='");
        const Token& kind_tok = p.expect(Token::Name, "gate kind");
        const auto kind = gate_kind_from_string(kind_tok.text);
        if (!kind)
            throw NetlistError(NetlistError::Kind::Syntax, head.text,
                               "unknown gate kind '" + kind_tok.text + "'", line_no,
                               kind_tok.column);
        p.expect(Token::LParen, "'('");
        Gate gate{head.text, *kind, {}};
        if (!p.at(Token::RParen)) {
            for (;;) {
                const Token& arg = p.expect(Token::Name, "fan-in signal name");
                gate.fanin.push_back(arg.text);
                first_use.try_emplace(arg.text, Position{line_no, arg.column});
                if (!p.at(Token::Comma)) break;
                p.expect(Token::Comma, "','");
            }
        }
        p.expect(Token::RParen, "')'");
        p.expect_end();
        definition[head.text] = {line_no, head.column};
        gates.push_back(std::move(gate));
    }

    try {
        return Netlist(std::move(name), std::move(inputs), std::move(outputs), std::move(gates));
    } catch (const NetlistError& e) {
        Position at{0, 0};
        const bool prefer_definition = e.kind() == NetlistError::Kind::DuplicateDriver ||
                                       e.kind() == NetlistError::Kind::Arity ||
                                       e.kind() == NetlistError::Kind::Cycle;
        const auto& primary = prefer_definition ? definition : first_use;
        const auto& secondary = prefer_definition ? first_use : definition;
        if (auto it = primary.find(e.signal()); it != primary.end()) {
            at = it->second;
        } else if (auto it2 = secondary.find(e.signal()); it2 != secondary.end()) {
            at = it2->second;
        }
        throw NetlistError(e.kind(), e.signal(), e.detail(), at.line, at.column);
    }
}

Netlist read_bench_file(const std::filesystem::path& path) {
    return parse_bench(read_file(path), path.stem().string());
}

std::string serialize_bench(const Netlist& netlist) {
    std::ostringstream os;
    os << "# " << netlist.name() << '\n';
    for (const auto& in : netlist.inputs()) os << "INPUT(" << in << ")\n";
    for (const auto& out : netlist.outputs()) os << "OUTPUT(" << out << ")\n";
    for (const auto& gate : netlist.gates()) {
        os << gate.output << " = " << to_string(gate.kind) << '(';
        for (std::size_t i = 0; i < gate.fanin.size(); ++i) {
            if (i) os << ", ";
            os << gate.fanin[i];
        }
        os << ")\n";
    }
    return os.str();
}

TopoOrder topo_order(const Netlist& netlist) { return netlist.topo(); }

bool is_valid_topo_order(const Netlist& netlist, const TopoOrder& order) {
    const auto& gates = netlist.gates();
    if (order.gates.size() != gates.size()) return false;
    std::vector<std::size_t> position(gates.size(), gates.size());
    for (std::size_t i = 0; i < order.gates.size(); ++i) {
        const std::size_t g = order.gates[i];
        if (g >= gates.size() || position[g] != gates.size()) return false;
        position[g] = i;
    }
    for (std::size_t g = 0; g < gates.size(); ++g) {
        for (const auto& in : gates[g].fanin) {
            if (auto d = netlist.driver(in); d && position[*d] >= position[g]) return false;
        }
    }
    return true;
}

// ---------------------------------------------------------------------------
// Random netlists

Netlist random_netlist(const RandomNetlistOptions& options, std::uint64_t seed, std::string name) {
    if (options.inputs == 0 || options.gates == 0 || options.outputs == 0 ||
        options.outputs > options.gates)
        throw Error("netlist", "random_netlist: need inputs, gates >= outputs >= 1");
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> unit(0.0, 1.0);

    std::vector<std::string> signals;
    std::vector<std::string> inputs;
    for (std::size_t i = 0; i < options.inputs; ++i) {
        inputs.push_back("i" + std::to_string(i));
        signals.push_back(inputs.back());
    }
    std::vector<bool> consumed(signals.size(), false);
    std::vector<Gate> gates;

    auto pick = [&](std::vector<std::size_t>& chosen) {
        std::vector<std::size_t> fresh;
        for (std::size_t s = 0; s < signals.size(); ++s)
            if (!consumed[s] && std::find(chosen.begin(), chosen.end(), s) == chosen.end())
                fresh.push_back(s);
        std::size_t s;
        if (!fresh.empty() && unit(rng) < 0.7) {
            s = fresh[std::uniform_int_distribution<std::size_t>(0, fresh.size() - 1)(rng)];
        } else {
            do {
                s = std::uniform_int_distribution<std::size_t>(0, signals.size() - 1)(rng);
            } while (std::find(chosen.begin(), chosen.end(), s) != chosen.end());
        }
        chosen.push_back(s);
    };

    static constexpr GateKind kMulti[] = {GateKind::And, GateKind::Nand, GateKind::Or,
                                          GateKind::Nor};
    for (std::size_t g = 0; g < options.gates; ++g) {
        GateKind kind;
        std::size_t arity;
        const double r = unit(rng);
        if (r < options.unary_fraction) {
            kind = unit(rng) < 0.85 ? GateKind::Not : GateKind::Buf;
            arity = 1;
        } else if (r < options.unary_fraction + options.xor_fraction) {
            kind = unit(rng) < 0.5 ? GateKind::Xor : GateKind::Xnor;
            arity = 2;
        } else {
            kind = kMulti[std::uniform_int_distribution<int>(0, 3)(rng)];
            arity = std::uniform_int_distribution<std::size_t>(2, std::max<std::size_t>(2, options.max_fanin))(rng);
        }
        arity = std::min(arity, signals.size());
        if (arity < 2 && kind != GateKind::Not && kind != GateKind::Buf) {
            kind = GateKind::Not;
            arity = 1;
        }
        std::vector<std::size_t> chosen;
        for (std::size_t a = 0; a < arity; ++a) pick(chosen);
        Gate gate{"n" + std::to_string(g), kind, {}};
        for (std::size_t s : chosen) {
            consumed[s] = true;
            gate.fanin.push_back(signals[s]);
        }
        signals.push_back(gate.output);
        consumed.push_back(false);
        gates.push_back(std::move(gate));
    }

    std::vector<std::string> outputs;
    for (std::size_t g = gates.size() - options.outputs; g < gates.size(); ++g)
        outputs.push_back(gates[g].output);
    if (options.shuffle_declarations) std::shuffle(gates.begin(), gates.end(), rng);
    return Netlist(std::move(name), std::move(inputs), std::move(outputs), std::move(gates));
}

namespace {

Netlist pinwise(std::size_t width, GateKind kind, std::string name) {
    if (width == 0) throw Error("netlist", name + ": width must be >= 1");
    std::vector<std::string> in, out;
    std::vector<Gate> gates;
    for (std::size_t i = 0; i < width; ++i) {
        in.push_back("x" + std::to_string(i));
        out.push_back("y" + std::to_string(i));
        gates.push_back(Gate{out.back(), kind, {in.back()}});
    }
    return Netlist(std::move(name), std::move(in), std::move(out), std::move(gates));
}

}  // namespace

Netlist identity_netlist(std::size_t width) { return pinwise(width, GateKind::Buf, "identity" + std::to_string(width)); }
Netlist inverter_bank(std::size_t width) { return pinwise(width, GateKind::Not, "inverters" + std::to_string(width)); }

}  // namespace lockbreak
