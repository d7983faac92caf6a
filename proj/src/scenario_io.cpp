#include "dpdp/config.hpp"
#include "dpdp/simulation.hpp"

#include <istream>
#include <ostream>
#include <sstream>

namespace dpdp {

namespace {

constexpr const char* kMagic = "dpdp-scenario";
constexpr int kVersion = 1;

std::string point(const Location& p) { return format_double(p.x) + ' ' + format_double(p.y); }

std::string next_line(std::istream& in, const char* what) {
  std::string line;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (!line.empty() && line.front() != '#') return line;
  }
  throw std::runtime_error(std::string("scenario file truncated: expected ") + what);
}

Location read_point(std::istringstream& in, const char* what) {
  std::string x;
  std::string y;
  if (!(in >> x >> y)) throw std::runtime_error(std::string("scenario file: missing coordinates for ") + what);
  return {parse_double(x, what), parse_double(y, what)};
}

std::size_t read_count(std::istream& in, const char* keyword) {
  std::istringstream line(next_line(in, keyword));
  std::string word;
  long long n = -1;
  if (!(line >> word >> n) || word != keyword || n < 0) {
    throw std::runtime_error(std::string("scenario file: expected '") + keyword + " <count>'");
  }
  return static_cast<std::size_t>(n);
}

}  // namespace

void write_scenario(std::ostream& out, const Scenario& scenario) {
  out << kMagic << ' ' << kVersion << '\n';
  for (const auto& [key, value] : scenario_config_entries(scenario.config)) out << key << '=' << value << '\n';
  out << "stores " << scenario.stores.size() << '\n';
  for (const Location& s : scenario.stores) out << point(s) << '\n';
  out << "orders " << scenario.arrivals.size() << '\n';
  for (const Order& o : scenario.arrivals) {
    const bool one_to_n = o.kind == OrderKind::OneToN;
    const Request& first = o.requests.front();
    out << o.arrival_time << ' ' << to_string(o.kind) << ' ' << o.requests.size() << ' '
        << point(one_to_n ? first.store : first.customer);
    for (const Request& r : o.requests) out << ' ' << point(one_to_n ? r.customer : r.store);
    out << '\n';
  }
  out << "end\n";
}

Scenario read_scenario(std::istream& in) {
  {
    std::istringstream header(next_line(in, "header"));
    std::string magic;
    int version = 0;
    if (!(header >> magic >> version) || magic != kMagic) throw std::runtime_error("not a dpdp scenario file");
    if (version != kVersion) throw std::runtime_error("unsupported scenario version " + std::to_string(version));
  }
  Scenario s;
  std::string line;
  for (;;) {
    line = next_line(in, "config or stores");
    if (line.rfind("stores", 0) == 0) break;
    std::string key;
    std::string value;
    if (!split_key_value(line, key, value)) continue;
    if (!set_scenario_key(s.config, key, value)) throw std::runtime_error("unknown scenario key '" + key + "'");
  }
  s.config.validate();
  std::istringstream stores_line(line);
  std::string word;
  long long num_stores = -1;
  if (!(stores_line >> word >> num_stores) || num_stores < 0) throw std::runtime_error("scenario file: bad stores line");
  for (long long k = 0; k < num_stores; ++k) {
    std::istringstream row(next_line(in, "store"));
    s.stores.push_back(read_point(row, "store"));
  }

  const std::size_t num_orders = read_count(in, "orders");
  RequestId next_request = 0;
  for (std::size_t k = 0; k < num_orders; ++k) {
    std::istringstream row(next_line(in, "order"));
    Order o;
    o.id = static_cast<OrderId>(k);
    std::string time;
    std::string kind;
    std::string size;
    if (!(row >> time >> kind >> size)) throw std::runtime_error("scenario file: malformed order line");
    o.arrival_time = parse_integer(time, "order time");
    if (kind == "1toN") {
      o.kind = OrderKind::OneToN;
    } else if (kind == "Nto1") {
      o.kind = OrderKind::NToOne;
    } else {
      throw std::runtime_error("scenario file: unknown order kind '" + kind + "'");
    }
    const long long n = parse_integer(size, "order size");
    if (n < 1) throw std::runtime_error("scenario file: order size must be positive");
    const Location shared = read_point(row, "order");
    for (long long i = 0; i < n; ++i) {
      Request r;
      r.id = next_request++;
      r.order = o.id;
      r.order_time = o.arrival_time;
      r.deadline = o.arrival_time + s.config.deadline_offset;
      const Location other = read_point(row, "order");
      r.store = o.kind == OrderKind::OneToN ? shared : other;
      r.customer = o.kind == OrderKind::OneToN ? other : shared;
      o.requests.push_back(r);
    }
    if (!s.arrivals.empty() && s.arrivals.back().arrival_time > o.arrival_time) {
      throw std::runtime_error("scenario file: orders out of time order");
    }
    s.arrivals.push_back(std::move(o));
  }
  if (next_line(in, "end") != "end") throw std::runtime_error("scenario file: missing end marker");
  return s;
}

}  // namespace dpdp
