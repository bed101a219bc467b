#include "ecl/instruct/grammar.hpp"

#include <algorithm>
#include <set>
#include <sstream>

#include "ecl/common/error.hpp"
#include "ecl/common/io.hpp"

namespace ecl {

namespace {

constexpr std::string_view kHeader = "# ecl-grammar v1";

std::string trim(std::string s) {
  const auto b = s.find_first_not_of(" \t\r");
  const auto e = s.find_last_not_of(" \t\r");
  return b == std::string::npos ? "" : s.substr(b, e - b + 1);
}

std::vector<std::string> split_words(std::string_view text) {
  std::istringstream in{std::string(text)};
  std::vector<std::string> words;
  std::string w;
  while (in >> w) words.push_back(w);
  return words;
}

std::vector<std::string> tokenize_instruction(std::string_view text) {
  std::string s = to_lower(text);
  while (!s.empty() && (s.back() == '.' || s.back() == '!' || std::isspace(static_cast<unsigned char>(s.back()))))
    s.pop_back();
  return split_words(s);
}

bool is_slot(const std::string& tok) { return tok.size() > 2 && tok.front() == '{' && tok.back() == '}'; }
std::string slot_name(const std::string& tok) { return tok.substr(1, tok.size() - 2); }

ExpansionStep parse_step(const std::string& text) {
  const auto words = split_words(text);
  if (words.size() != 2) throw FormatError("grammar: bad expansion step '" + text + "'");
  ExpansionStep s;
  s.target = words[1];
  const auto& verb = words[0];
  if (verb == "goto") s.action = SubtaskAction::GotoLocation;
  else if (verb == "pickup") s.action = SubtaskAction::PickupObject;
  else if (verb == "put") s.action = SubtaskAction::PutObject;
  else if (verb == "slice") s.action = SubtaskAction::SliceObject;
  else if (verb == "toggleon") s.action = SubtaskAction::ToggleObject;
  else if (verb == "toggleoff") {
    s.action = SubtaskAction::ToggleObject;
    s.toggle_on = false;
  } else {
    throw FormatError("grammar: unknown step verb '" + verb + "'");
  }
  return s;
}

std::vector<ExpansionStep> parse_steps(const std::string& text) {
  std::vector<ExpansionStep> steps;
  std::istringstream in(text);
  std::string part;
  while (std::getline(in, part, ';')) {
    part = trim(part);
    if (!part.empty()) steps.push_back(parse_step(part));
  }
  if (steps.empty()) throw FormatError("grammar: empty expansion");
  return steps;
}

bool slot_accepts(const Production& p, const std::string& slot, const ClassInfo& c) {
  if (c.background) return false;
  const bool has_parent =
      std::find(p.tokens.begin(), p.tokens.end(), std::string("{parent}")) != p.tokens.end();
  if (slot == "obj") {
    if (!c.pickupable) return false;
    if (p.sliced && !c.sliceable) return false;
    if (has_parent && c.receptacle) return false;
    return true;
  }
  if (slot == "recep") return c.receptacle && !c.pickupable;
  if (slot == "parent") return c.receptacle && c.pickupable;
  return false;
}

}  // namespace

std::string Production::text() const {
  std::string s;
  for (const auto& t : tokens) s += (s.empty() ? "" : " ") + t;
  return s;
}

Grammar Grammar::parse(std::string_view text) {
  Grammar g;
  std::istringstream in{std::string(text)};
  std::string line;
  if (!std::getline(in, line) || trim(line) != kHeader)
    throw FormatError("grammar: missing '" + std::string(kHeader) + "' header");
  while (std::getline(in, line)) {
    line = trim(line);
    if (line.empty() || line[0] == '#') continue;
    const auto colon = line.find(':');
    std::istringstream head(line.substr(0, colon));
    std::string kw;
    head >> kw;
    if (kw == "template") {
      if (colon == std::string::npos) throw FormatError("grammar: template without ':'");
      Production p;
      std::string task, mod;
      head >> task >> mod;
      p.task_type = parse_task_type(task);
      if (!mod.empty() && mod != "sliced") throw FormatError("grammar: bad template modifier '" + mod + "'");
      p.sliced = mod == "sliced";
      p.tokens = split_words(to_lower(line.substr(colon + 1)));
      for (const auto& t : p.tokens)
        if (is_slot(t) && slot_name(t) != "obj" && slot_name(t) != "recep" && slot_name(t) != "parent")
          throw FormatError("grammar: unknown slot " + t);
      g.productions_.push_back(std::move(p));
    } else if (kw == "fixed") {
      std::string task, binding;
      std::istringstream all(line);
      all >> kw >> task >> binding;
      const auto eq = binding.find('=');
      if (eq == std::string::npos) throw FormatError("grammar: bad fixed binding '" + line + "'");
      g.fixed_[parse_task_type(task)][binding.substr(0, eq)] = binding.substr(eq + 1);
    } else if (kw == "expand") {
      std::string task;
      head >> task;
      g.expansions_[parse_task_type(task)] = parse_steps(line.substr(colon + 1));
    } else if (kw == "prefix") {
      std::string which;
      head >> which;
      if (which != "sliced") throw FormatError("grammar: unknown prefix '" + which + "'");
      g.sliced_prefix_ = parse_steps(line.substr(colon + 1));
    } else {
      throw FormatError("grammar: unexpected line '" + line + "'");
    }
  }
  for (const auto& p : g.productions_)
    if (!g.expansions_.count(p.task_type))
      throw FormatError(std::string("grammar: no expansion for ") + task_type_name(p.task_type));
  return g;
}

Grammar Grammar::load(const std::filesystem::path& path) { return parse(read_file(path)); }

const std::vector<ExpansionStep>& Grammar::expansion(TaskType t) const {
  auto it = expansions_.find(t);
  if (it == expansions_.end()) throw ConfigError(std::string("grammar has no expansion for ") + task_type_name(t));
  return it->second;
}

std::map<std::string, std::string> Grammar::fixed_slots(TaskType t) const {
  auto it = fixed_.find(t);
  return it == fixed_.end() ? std::map<std::string, std::string>{} : it->second;
}

std::vector<ClassId> Grammar::slot_domain(const Production& p, const std::string& slot,
                                          const Catalog& catalog) const {
  std::vector<ClassId> out;
  for (ClassId c = 0; c < catalog.size(); ++c)
    if (slot_accepts(p, slot, catalog[c])) out.push_back(c);
  return out;
}

namespace {

Program build_program(const Production& p, const std::map<std::string, ClassId>& slots,
                      const Grammar& grammar, const Catalog& catalog) {
  Program prog;
  prog.task_type = p.task_type;
  prog.args.sliced = p.sliced;
  std::map<std::string, ClassId> bound = slots;
  for (const auto& [slot, cls] : grammar.fixed_slots(p.task_type)) bound[slot] = catalog.require(cls);
  if (!bound.count("obj") || !bound.count("recep"))
    throw ConfigError(std::string("grammar production for ") + task_type_name(p.task_type) +
                      " does not bind obj and recep");
  prog.args.obj = bound.at("obj");
  prog.args.recep = bound.at("recep");
  if (bound.count("parent")) prog.args.parent = bound.at("parent");
  auto resolve = [&](const std::string& target) -> ClassId {
    auto it = bound.find(target);
    if (it != bound.end()) return it->second;
    if (target == "obj" || target == "recep" || target == "parent")
      throw ConfigError("expansion refers to unbound slot '" + target + "'");
    return catalog.require(target);
  };
  auto append = [&](const std::vector<ExpansionStep>& steps) {
    for (const auto& s : steps) prog.subtasks.push_back({s.action, resolve(s.target), s.toggle_on});
  };
  if (p.sliced) append(grammar.sliced_prefix());
  append(grammar.expansion(p.task_type));
  return prog;
}

}  // namespace

Program parse(const Instruction& instruction, const Grammar& grammar, const Catalog& catalog) {
  const auto words = tokenize_instruction(instruction.text);
  struct Match {
    const Production* production;
    std::map<std::string, ClassId> slots;
  };
  std::vector<Match> matches;
  std::optional<std::string> unknown_word;
  std::optional<std::string> rejected;
  for (const auto& p : grammar.productions()) {
    if (p.tokens.size() != words.size()) continue;
    bool structural = true;
    for (size_t i = 0; i < words.size() && structural; ++i)
      if (!is_slot(p.tokens[i]) && p.tokens[i] != words[i]) structural = false;
    if (!structural) continue;
    Match m{&p, {}};
    bool ok = true;
    for (size_t i = 0; i < words.size() && ok; ++i) {
      if (!is_slot(p.tokens[i])) continue;
      const auto slot = slot_name(p.tokens[i]);
      auto cls = catalog.find(words[i]);
      if (!cls) {
        unknown_word = words[i];
        ok = false;
      } else if (!slot_accepts(p, slot, catalog[*cls])) {
        rejected = "'" + words[i] + "' cannot fill {" + slot + "}";
        ok = false;
      } else {
        m.slots[slot] = *cls;
      }
    }
    if (ok && instruction.task_type && *instruction.task_type != p.task_type) ok = false;
    if (ok) matches.push_back(std::move(m));
  }
  if (matches.size() > 1) {
    std::vector<std::string> candidates;
    for (const auto& m : matches)
      candidates.push_back(std::string(task_type_name(m.production->task_type)) + ": " + m.production->text());
    throw AmbiguityError("ambiguous instruction '" + instruction.text + "'", candidates);
  }
  if (matches.empty()) {
    if (unknown_word) throw UnknownConceptError(*unknown_word);
    if (rejected) throw InputError("no production accepts '" + instruction.text + "': " + *rejected);
    throw InputError("no production matches '" + instruction.text + "'");
  }
  Program prog = build_program(*matches.front().production, matches.front().slots, grammar, catalog);
  validate_program(prog, catalog);
  return prog;
}

std::string render(const Program& program, const Grammar& grammar, const Catalog& catalog) {
  for (const auto& p : grammar.productions()) {
    if (p.task_type != program.task_type || p.sliced != program.args.sliced) continue;
    const bool wants_parent =
        std::find(p.tokens.begin(), p.tokens.end(), std::string("{parent}")) != p.tokens.end();
    if (wants_parent != program.args.parent.has_value()) continue;
    std::string out;
    for (const auto& t : p.tokens) {
      std::string word = t;
      if (is_slot(t)) {
        const auto slot = slot_name(t);
        const ClassId cls = slot == "obj" ? program.args.obj
                            : slot == "recep" ? program.args.recep
                                              : *program.args.parent;
        word = to_lower(catalog[cls].name);
      }
      out += (out.empty() ? "" : " ") + word;
    }
    return out;
  }
  throw InputError(std::string("no production renders a ") + task_type_name(program.task_type) + " program");
}

std::vector<std::string> enumerate_instructions(const Grammar& grammar, const Catalog& catalog) {
  std::vector<std::string> out;
  for (const auto& p : grammar.productions()) {
    std::vector<std::string> partial{""};
    for (const auto& t : p.tokens) {
      std::vector<std::string> words;
      if (is_slot(t)) {
        for (ClassId c : grammar.slot_domain(p, slot_name(t), catalog)) words.push_back(to_lower(catalog[c].name));
      } else {
        words.push_back(t);
      }
      std::vector<std::string> next;
      for (const auto& prefix : partial)
        for (const auto& w : words) next.push_back(prefix.empty() ? w : prefix + " " + w);
      partial = std::move(next);
    }
    out.insert(out.end(), partial.begin(), partial.end());
  }
  return out;
}

}  // namespace ecl
