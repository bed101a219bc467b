#include "ecl/executor/tasks.hpp"

#include <map>
#include <set>

#include "ecl/common/error.hpp"

namespace ecl {

namespace {

std::map<ClassId, int> inventory(const GridWorld& world) {
  std::map<ClassId, int> n;
  for (const auto& o : world.objects())
    if (o.placed()) ++n[o.class_id];
  return n;
}

}  // namespace

std::optional<TaskInstance> sample_task(const GridWorld& world, const Grammar& grammar, TaskType type,
                                        bool allow_sliced, Rng& rng) {
  const Catalog& catalog = world.catalog();
  const auto inv = inventory(world);
  auto present = [&](const std::string& name, int need = 1) {
    const auto cls = catalog.find(name);
    if (!cls) return false;
    const auto it = inv.find(*cls);
    return it != inv.end() && it->second >= need;
  };

  std::vector<TaskInstance> options;
  for (const auto& p : grammar.productions()) {
    if (p.task_type != type || (p.sliced && !allow_sliced)) continue;
    if (p.sliced && !(present("Knife") && present("CounterTop"))) continue;
    bool supported = true;
    for (const auto& step : grammar.expansion(type))
      if (step.target != "obj" && step.target != "recep" && step.target != "parent" && !present(step.target))
        supported = false;
    if (!supported) continue;
    const auto fixed = grammar.fixed_slots(type);
    std::map<std::string, std::vector<ClassId>> domains;
    for (const auto& tok : p.tokens) {
      if (tok.size() < 3 || tok.front() != '{') continue;
      const std::string slot = tok.substr(1, tok.size() - 2);
      std::vector<ClassId> ok;
      for (ClassId c : grammar.slot_domain(p, slot, catalog)) {
        const int need = (slot == "obj" && type == TaskType::PickTwoAndPlace) ? 2 : 1;
        if (present(catalog[c].name, need)) ok.push_back(c);
      }
      domains[slot] = ok;
    }
    for (const auto& [slot, value] : fixed)
      if (!present(value)) supported = false;
    if (!supported) continue;
    // Enumerate every slot filling of this production.
    std::vector<std::map<std::string, ClassId>> fills{{}};
    for (const auto& [slot, dom] : domains) {
      std::vector<std::map<std::string, ClassId>> next;
      for (const auto& f : fills)
        for (ClassId c : dom) {
          auto g = f;
          g[slot] = c;
          next.push_back(std::move(g));
        }
      fills = std::move(next);
    }
    for (const auto& f : fills) {
      // A knife cannot slice itself and obj, parent and recep stay distinct.
      std::set<ClassId> distinct;
      for (const auto& kv : f) distinct.insert(kv.second);
      if (distinct.size() != f.size()) continue;
      std::string text;
      for (const auto& tok : p.tokens) {
        if (!text.empty()) text += ' ';
        if (tok.size() >= 3 && tok.front() == '{')
          text += to_lower(catalog[f.at(tok.substr(1, tok.size() - 2))].name);
        else
          text += tok;
      }
      try {
        options.push_back({text, parse(Instruction{text, type}, grammar, catalog)});
      } catch (const Error&) {
      }
    }
  }
  if (options.empty()) return std::nullopt;
  return options[std::uniform_int_distribution<size_t>(0, options.size() - 1)(rng)];
}

}  // namespace ecl
