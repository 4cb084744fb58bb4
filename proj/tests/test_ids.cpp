#include "doctest.h"

#include "evoforge/ids.hpp"
#include "evoforge/registry.hpp"

using namespace evoforge;

TEST_CASE("encode_id produces the documented bit strings") {
  CHECK(to_bit_string(encode_id(1, 1, 1)) == "1-000001-000000001");  // DE/rand/1
  CHECK(to_bit_string(encode_id(0, 1, 1)) == "0-000001-000000001");  // Uniform
  CHECK(to_bit_string(encode_id(0, 7, 1)) == "0-000111-000000001");  // end
}

TEST_CASE("decode_id inverts encode_id") {
  CHECK(decode_id(id_from_bit_string("1-000010-000000001")) ==
        DecodedId{1, 2, 1});  // Binomial crossover
  CHECK(decode_id(id_from_bit_string("0-000110-000000001")) ==
        DecodedId{0, 6, 1});  // Linear reduction

  for (int flag = 0; flag <= 1; ++flag)
    for (int kind = 1; kind <= 7; ++kind)
      for (int var : {1, 2, 17, 255, 511}) {
        ModuleId id = encode_id(flag, kind, var);
        CHECK(decode_id(id) == DecodedId{flag, kind, var});
        CHECK(id_from_bit_string(to_bit_string(id)) == id);
      }
}

TEST_CASE("encode_id rejects out-of-range fields") {
  CHECK_THROWS_AS(encode_id(2, 1, 1), std::invalid_argument);
  CHECK_THROWS_AS(encode_id(0, 0, 1), std::invalid_argument);
  CHECK_THROWS_AS(encode_id(0, 8, 1), std::invalid_argument);
  CHECK_THROWS_AS(encode_id(0, 1, 0), std::invalid_argument);
  CHECK_THROWS_AS(encode_id(0, 1, 512), std::invalid_argument);
}

TEST_CASE("registry holds the full specified variant set") {
  const Registry& reg = Registry::builtin();
  CHECK(reg.variant_count() == 57);
  CHECK(reg.token_count() == 58);
  CHECK(reg.at(reg.end_index()).kind == ModuleKind::End);

  auto count_kind = [&](ModuleKind k) {
    int c = 0;
    for (const auto& v : reg.variants())
      if (v.kind == k) ++c;
    return c;
  };
  CHECK(count_kind(ModuleKind::Initialization) == 5);
  CHECK(count_kind(ModuleKind::Niching) == 3);
  CHECK(count_kind(ModuleKind::BoundaryControl) == 5);
  CHECK(count_kind(ModuleKind::Selection) == 6);
  CHECK(count_kind(ModuleKind::RestartStrategy) == 4);
  CHECK(count_kind(ModuleKind::PopulationReduction) == 2);
  CHECK(count_kind(ModuleKind::Mutation) == 16);   // 13 + 3 multi-strategies
  CHECK(count_kind(ModuleKind::Crossover) == 8);   // 6 + 2 multi-strategies
  CHECK(count_kind(ModuleKind::OtherUpdate) == 7); // 6 + 1 multi-strategy
  CHECK(count_kind(ModuleKind::InformationSharing) == 1);

  // ID bijectivity over the registry.
  for (const auto& v : reg.variants()) {
    auto d = decode_id(v.id);
    CHECK(encode_id(d.controllable, d.kind_index, d.variant_index) == v.id);
    CHECK(reg.lookup(v.id).name == v.name);
  }

  // Multi-strategy ids live in the multi-strategy namespace but report the
  // constituent kind.
  const auto& mm1 = reg.lookup(id_from_bit_string("1-000100-000000001"));
  CHECK(mm1.name == "Multi_Mutation_1");
  CHECK(mm1.kind == ModuleKind::Mutation);
  const auto& mc1 = reg.lookup(id_from_bit_string("1-000100-000110010"));
  CHECK(mc1.name == "Multi_Crossover_1");
  CHECK(mc1.kind == ModuleKind::Crossover);
  const auto& mp1 = reg.lookup(id_from_bit_string("1-000100-000001010"));
  CHECK(mp1.name == "Multi_PSO_1");
  CHECK(mp1.kind == ModuleKind::OtherUpdate);
}

TEST_CASE("unregistered id lookup fails, decode stays total") {
  const Registry& reg = Registry::builtin();
  ModuleId bogus = encode_id(1, 7, 300);
  CHECK(decode_id(bogus) == DecodedId{1, 7, 300});
  CHECK(!reg.contains(bogus));
  CHECK_THROWS_AS(reg.index_of(bogus), std::out_of_range);
}

TEST_CASE("config spaces respect bounds and selector rules") {
  const Registry& reg = Registry::builtin();
  for (const auto& v : reg.variants()) {
    CHECK(v.config_space.size() <= kMaxConfigSize);
    int selectors = 0;
    for (const auto& p : v.config_space.params()) {
      CHECK(p.lower < p.upper);
      CHECK(p.default_value >= p.lower);
      CHECK(p.default_value <= p.upper);
      if (p.role == ParamRole::OperatorSelector) ++selectors;
    }
    if (selectors > 0) CHECK(v.is_multi_strategy());
    if (!v.controllable()) CHECK(v.config_space.empty());
  }
}
