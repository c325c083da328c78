/*
 * Copyright 2026 The Trajkit Authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *      http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#include "trajkit/manifest.hpp"

#include <algorithm>
#include <cerrno>
#include <cstdio>
#include <cstdlib>
#include <limits>
#include <map>
#include <set>

#include "trajkit/error.hpp"
#include "trajkit/serialization.hpp"

namespace trajkit {

namespace {

using detail::LineReader;
using detail::parse_float_token;
using detail::parse_int_token;
using detail::split_tokens;

constexpr const char* kHumanPrompts[] = {
    "a tall man in a long gray coat walking with purpose",
    "a young woman with a yellow backpack strolling casually",
    "an elderly man leaning slightly forward as he walks",
    "a jogger in a blue tracksuit keeping a steady pace",
    "a courier in a reflective vest carrying a parcel",
    "a woman in a red raincoat holding an umbrella",
    "a businessman in a navy suit checking his watch",
    "a teenager in a hooded sweatshirt with headphones on",
    "a chef in whites crossing between kitchen stations",
    "a hiker with trekking poles and a heavy pack",
    "a dancer in loose clothing moving with light steps",
    "a security guard in a dark uniform on patrol",
    "a painter in splattered overalls carrying a ladder",
    "a tourist with a camera hanging from her neck",
    "a nurse in teal scrubs walking between wards",
    "a street musician carrying a guitar case",
    "a tall woman in a green parka and boots",
    "a man pushing up his sleeves as he strides",
    "a delivery rider still wearing a cycling helmet",
    "a gardener in a straw hat with a watering can",
    "a schoolteacher balancing a stack of notebooks",
    "a runner in bright orange shoes warming up",
    "a photographer crouching slightly with a long lens",
    "a barista in a denim apron carrying two cups",
    "a firefighter in partial gear walking off duty",
    "a grandmother in a floral dress with a cane",
    "a skateboarder carrying his board under one arm",
    "a mechanic in a gray jumpsuit wiping his hands",
    "a florist cradling a wrapped bouquet of tulips",
    "a mail carrier with a heavy shoulder bag",
    "a surgeon in a cap walking briskly down a corridor",
    "a fisherman in waders with a rod over his shoulder",
    "a librarian in a cardigan holding a returned book",
    "a construction worker in a hard hat and vest",
    "a violinist in concert black with her instrument case",
};

constexpr const char* kAnimalPrompts[] = {
    "a golden retriever trotting with its tail high",
    "a black cat slinking low to the ground",
    "a gray wolf moving in a steady lope",
    "a white rabbit hopping in short bursts",
    "a red fox stepping carefully through the grass",
    "a border collie circling with quick footwork",
    "a spotted fawn walking on thin unsteady legs",
    "a heavyset bulldog ambling without hurry",
    "a tabby kitten pouncing between strides",
    "a peacock dragging its folded train behind it",
    "a brown bear cub shuffling on all fours",
    "a raccoon scuttling with its back arched",
    "a white goose waddling with its neck stretched",
    "a long-haired dachshund trotting close to the ground",
    "a gray squirrel darting in stop-start bursts",
    "a shaggy pony walking with a relaxed gait",
    "a penguin rocking side to side as it walks",
    "a lean greyhound padding softly and slowly",
    "a hedgehog trundling along with tiny steps",
    "a rooster strutting with exaggerated head bobs",
    "a young goat skipping sideways now and then",
    "a sleek otter humping along on land",
    "a husky pulling slightly against an invisible lead",
    "a flamingo stepping high on backward-bending legs",
    "a badger shambling with its nose to the ground",
    "a dalmatian trotting with even spotted strides",
    "a siamese cat walking a perfectly straight line",
    "a baby elephant swaying its trunk as it walks",
    "a turkey fanning its tail mid-strut",
    "a lamb bouncing stiff-legged across the grass",
    "a corgi hustling on short quick legs",
    "a llama pacing with a level unhurried stare",
    "a tortoise inching forward with deliberate steps",
    "a capuchin monkey knuckle-walking in a curve",
    "a snow leopard padding silently with a low head",
};

std::string two_digit(int value) {
  char buf[8];
  std::snprintf(buf, sizeof(buf), "%02d", value);
  return std::string(buf);
}

std::string comp_id_for(int index) {
  char buf[16];
  std::snprintf(buf, sizeof(buf), "c%06d", index);
  return std::string(buf);
}

long long saturating_mul(long long a, long long b) {
  constexpr long long kCap = std::numeric_limits<long long>::max();
  if (a == 0 || b == 0) return 0;
  if (a > kCap / b) return kCap;
  return a * b;
}

long long saturating_add(long long a, long long b) {
  constexpr long long kCap = std::numeric_limits<long long>::max();
  if (a > kCap - b) return kCap;
  return a + b;
}

// C(n, k) with saturation; k is at most 3 here so the loop is tiny.
long long comb(std::size_t n, std::size_t k) {
  if (k > n) return 0;
  long long result = 1;
  for (std::size_t i = 0; i < k; ++i) {
    result = saturating_mul(result, static_cast<long long>(n - i));
    result /= static_cast<long long>(i + 1);
  }
  return result;
}

// Draws `count` distinct indices from [0, n) via a partial shuffle, in the
// order they were drawn.
std::vector<std::size_t> sample_indices(std::size_t n, std::size_t count,
                                        SeededRng& rng) {
  std::vector<std::size_t> idx(n);
  for (std::size_t i = 0; i < n; ++i) idx[i] = i;
  for (std::size_t i = 0; i < count; ++i) {
    const std::size_t j =
        i + static_cast<std::size_t>(
                rng.below(static_cast<std::uint64_t>(n - i)));
    std::swap(idx[i], idx[j]);
  }
  idx.resize(count);
  return idx;
}

void require_manifest_token(const std::string& value, const char* what) {
  if (value.empty()) {
    throw ValidationError(std::string(what) + " must be non-empty");
  }
  for (char ch : value) {
    if (ch == ' ' || ch == '\n' || ch == '\t' || ch == '\r') {
      throw ValidationError(std::string(what) + " '" + value +
                            "' must not contain whitespace");
    }
  }
}

EntityKind kind_from_token(std::string_view token, std::size_t line_no) {
  if (token == "human") return EntityKind::human;
  if (token == "animal") return EntityKind::animal;
  throw ParseError(line_no,
                   "unknown entity kind '" + std::string(token) + "'");
}

}  // namespace

const std::vector<AssetRecord>& default_assets() {
  static const std::vector<AssetRecord> assets = [] {
    std::vector<AssetRecord> bank;
    bank.reserve(70);
    for (int i = 0; i < 35; ++i) {
      bank.push_back({"human_" + two_digit(i), EntityKind::human,
                      kHumanPrompts[i]});
    }
    for (int i = 0; i < 35; ++i) {
      bank.push_back({"animal_" + two_digit(i), EntityKind::animal,
                      kAnimalPrompts[i]});
    }
    return bank;
  }();
  return assets;
}

const std::vector<std::string>& default_locations() {
  static const std::vector<std::string> locations = {
      "warehouse", "street", "park", "plaza", "courtyard", "rooftop"};
  return locations;
}

long long achievable_compositions(std::size_t asset_count,
                                  std::size_t template_count,
                                  std::size_t location_count) {
  long long per_location = 0;
  const std::size_t n_max =
      std::min<std::size_t>(3, std::min(asset_count, template_count));
  for (std::size_t n = 1; n <= n_max; ++n) {
    per_location = saturating_add(
        per_location, saturating_mul(comb(asset_count, n),
                                     comb(template_count, n)));
  }
  return saturating_mul(per_location,
                        static_cast<long long>(location_count));
}

Manifest enumerate_manifest(const ManifestOptions& options,
                            const std::vector<AssetRecord>& assets,
                            const std::vector<TrajectoryTemplate>& templates) {
  if (options.compositions < 1) {
    throw RangeError("composition budget must be positive, got " +
                     std::to_string(options.compositions));
  }
  if (options.frames < 2) {
    throw ValidationError("manifest frame count must be at least 2, got " +
                          std::to_string(options.frames));
  }
  if (!(options.fps > 0.0)) {
    throw ValidationError("manifest fps must be positive");
  }
  if (assets.empty()) {
    throw ValidationError("asset bank must be non-empty");
  }
  if (templates.empty()) {
    throw ValidationError("template list must be non-empty");
  }
  const std::vector<std::string>& locations =
      options.locations.empty() ? default_locations() : options.locations;
  for (const std::string& tag : locations) {
    require_manifest_token(tag, "location tag");
  }
  {
    std::set<std::string> seen;
    for (const AssetRecord& asset : assets) {
      require_manifest_token(asset.asset_id, "asset id");
      if (asset.prompt.empty()) {
        throw ValidationError("asset '" + asset.asset_id +
                              "' has an empty prompt");
      }
      if (!seen.insert(asset.asset_id).second) {
        throw ValidationError("duplicate asset id '" + asset.asset_id + "'");
      }
    }
  }

  const long long achievable = achievable_compositions(
      assets.size(), templates.size(), locations.size());
  if (static_cast<long long>(options.compositions) > achievable) {
    throw RangeError("requested " + std::to_string(options.compositions) +
                     " compositions but only " + std::to_string(achievable) +
                     " distinct (asset-set, template-set, location) triples "
                     "exist");
  }

  std::map<std::string, const AssetRecord*> asset_by_id;
  for (const AssetRecord& asset : assets) {
    asset_by_id[asset.asset_id] = &asset;
  }
  std::map<std::string, const TrajectoryTemplate*> template_by_id;
  for (const TrajectoryTemplate& tmpl : templates) {
    require_manifest_token(tmpl.name, "template id");
    template_by_id[tmpl.name] = &tmpl;
  }

  Manifest manifest;
  manifest.seed = options.seed;
  manifest.rig = build_rig();
  manifest.assets = assets;

  SeededRng rng(options.seed);
  // Canonical sequences depend only on (template, frames, fps); the frame
  // grid is fixed for the whole manifest, so cache per template id.
  std::map<std::string, PoseSequenced> sequence_cache;
  const auto canonical_sequence =
      [&](const std::string& template_id) -> const PoseSequenced& {
    auto it = sequence_cache.find(template_id);
    if (it == sequence_cache.end()) {
      it = sequence_cache
               .emplace(template_id,
                        generate_template(*template_by_id.at(template_id),
                                          options.frames, options.fps))
               .first;
    }
    return it->second;
  };

  std::set<std::string> used_keys;
  std::set<std::string> failed_keys;
  const long long max_attempts =
      64LL * std::max(options.compositions, 1) + 1024;
  long long attempts = 0;
  const std::size_t n_cap =
      std::min<std::size_t>(3, std::min(assets.size(), templates.size()));

  while (static_cast<int>(manifest.compositions.size()) <
         options.compositions) {
    if (++attempts > max_attempts) {
      throw RangeError(
          "manifest enumeration stalled after " + std::to_string(attempts) +
          " draws; " + std::to_string(manifest.compositions.size()) + " of " +
          std::to_string(options.compositions) + " compositions placed");
    }
    const std::size_t n =
        1 + static_cast<std::size_t>(
                rng.below(static_cast<std::uint64_t>(n_cap)));

    std::vector<std::string> asset_ids;
    for (std::size_t i : sample_indices(assets.size(), n, rng)) {
      asset_ids.push_back(assets[i].asset_id);
    }
    std::sort(asset_ids.begin(), asset_ids.end());
    std::vector<std::string> template_ids;
    for (std::size_t i : sample_indices(templates.size(), n, rng)) {
      template_ids.push_back(templates[i].name);
    }
    std::sort(template_ids.begin(), template_ids.end());
    const std::string& location =
        locations[static_cast<std::size_t>(rng.below(locations.size()))];

    std::string key = location;
    for (const std::string& id : asset_ids) key += "|" + id;
    key += "#";
    for (const std::string& id : template_ids) key += "|" + id;
    if (used_keys.count(key) != 0 || failed_keys.count(key) != 0) {
      continue;
    }

    std::vector<const PoseSequenced*> sequences;
    for (const std::string& template_id : template_ids) {
      sequences.push_back(&canonical_sequence(template_id));
    }
    std::vector<Placement> placements;
    try {
      placements = place_trajectories(sequences, asset_ids, rng);
    } catch (const PlacementError&) {
      failed_keys.insert(key);
      continue;
    }

    used_keys.insert(key);
    ManifestComposition comp;
    comp.comp_id = comp_id_for(static_cast<int>(manifest.compositions.size()));
    comp.location_tag = location;
    comp.frames = options.frames;
    comp.fps = options.fps;
    for (std::size_t i = 0; i < n; ++i) {
      ManifestEntity entity;
      entity.asset_id = asset_ids[i];
      entity.template_id = template_ids[i];
      entity.scale_factor = scale_for_kind(asset_by_id.at(asset_ids[i])->kind);
      entity.yaw_rad = placements[i].yaw_rad;
      entity.dx = placements[i].dx;
      entity.dy = placements[i].dy;
      comp.entities.push_back(entity);
    }
    for (int k = 0; k < kRigCameraCount; ++k) {
      ClipRecord clip;
      clip.comp_id = comp.comp_id;
      clip.camera_index = k;
      clip.clip_id = comp.comp_id + "_cam" + two_digit(k);
      manifest.clips.push_back(clip);
    }
    manifest.compositions.push_back(std::move(comp));
  }
  return manifest;
}

Manifest enumerate_manifest(const ManifestOptions& options) {
  return enumerate_manifest(options, default_assets(), template_library());
}

SceneComposition realize_scene(const Manifest& manifest,
                               const ManifestComposition& comp) {
  std::map<std::string, const AssetRecord*> asset_by_id;
  for (const AssetRecord& asset : manifest.assets) {
    asset_by_id[asset.asset_id] = &asset;
  }

  SceneComposition scene;
  scene.stage_side = manifest.stage_side;
  scene.location_tag = comp.location_tag;
  for (const ManifestEntity& entity : comp.entities) {
    const auto asset_it = asset_by_id.find(entity.asset_id);
    if (asset_it == asset_by_id.end()) {
      throw ValidationError("composition '" + comp.comp_id +
                            "' references unknown asset '" + entity.asset_id +
                            "'");
    }
    const TrajectoryTemplate& tmpl = find_template(entity.template_id);
    const PoseSequenced canonical =
        generate_template(tmpl, comp.frames, comp.fps);
    Placement placement;
    placement.yaw_rad = entity.yaw_rad;
    placement.dx = entity.dx;
    placement.dy = entity.dy;

    SceneEntity out;
    out.entity_id = entity.asset_id;
    out.prompt = asset_it->second->prompt;
    out.scale_factor = entity.scale_factor;
    out.poses = apply_placement(placement, canonical);
    scene.entities.push_back(std::move(out));
  }
  validate_scene(scene);
  return scene;
}

std::string serialize_manifest(const Manifest& manifest) {
  validate_rig(manifest.rig);
  const Intrinsics& intr = manifest.rig.cameras.front().intrinsics;

  std::string out;
  out += "manifest 1\n";
  out += "convention ";
  out += kConventionToken;
  out += '\n';
  out += "seed " + std::to_string(manifest.seed) + '\n';
  out += "stage " + format_float(manifest.stage_side) + '\n';
  out += "rig_center " + format_float(manifest.rig.look_at.x()) + ' ' +
         format_float(manifest.rig.look_at.y()) + ' ' +
         format_float(manifest.rig.look_at.z()) + '\n';
  out += "rig_radius " + format_float(manifest.rig.radius) + '\n';
  out += "rig_height " + format_float(manifest.rig.height) + '\n';
  out += "intrinsics " + format_float(intr.fx) + ' ' + format_float(intr.fy) +
         ' ' + format_float(intr.cx) + ' ' + format_float(intr.cy) + ' ' +
         std::to_string(intr.width) + ' ' + std::to_string(intr.height) + '\n';

  out += "assets " + std::to_string(manifest.assets.size()) + '\n';
  for (const AssetRecord& asset : manifest.assets) {
    require_manifest_token(asset.asset_id, "asset id");
    if (asset.prompt.empty()) {
      throw ValidationError("asset '" + asset.asset_id +
                            "' has an empty prompt");
    }
    out += "asset " + asset.asset_id + ' ' + kind_name(asset.kind) + ' ' +
           asset.prompt + '\n';
  }

  out += "compositions " + std::to_string(manifest.compositions.size()) + '\n';
  for (const ManifestComposition& comp : manifest.compositions) {
    require_manifest_token(comp.comp_id, "composition id");
    require_manifest_token(comp.location_tag, "location tag");
    out += "composition " + comp.comp_id + ' ' + comp.location_tag + ' ' +
           std::to_string(comp.frames) + ' ' + format_float(comp.fps) + ' ' +
           std::to_string(comp.entities.size()) + '\n';
    for (const ManifestEntity& entity : comp.entities) {
      require_manifest_token(entity.asset_id, "asset id");
      require_manifest_token(entity.template_id, "template id");
      out += "entity " + entity.asset_id + ' ' + entity.template_id + ' ' +
             format_float(entity.scale_factor) + ' ' +
             format_float(entity.yaw_rad) + ' ' + format_float(entity.dx) +
             ' ' + format_float(entity.dy) + '\n';
    }
  }

  out += "clips " + std::to_string(manifest.clips.size()) + '\n';
  for (const ClipRecord& clip : manifest.clips) {
    require_manifest_token(clip.clip_id, "clip id");
    require_manifest_token(clip.comp_id, "composition id");
    out += "clip " + clip.clip_id + ' ' + clip.comp_id + ' ' +
           std::to_string(clip.camera_index) + '\n';
  }
  return out;
}

Manifest parse_manifest(std::string_view text) {
  LineReader reader(text);

  if (reader.next_line("'manifest 1' header") != "manifest 1") {
    throw ParseError(reader.line_number(), "expected header 'manifest 1'");
  }
  const std::string convention_line =
      std::string("convention ") + kConventionToken;
  if (reader.next_line("convention line") != convention_line) {
    throw ParseError(reader.line_number(),
                     "expected '" + convention_line + "'");
  }

  Manifest manifest;
  {
    const auto tokens = split_tokens(reader.next_line("seed line"));
    if (tokens.size() != 2 || tokens[0] != "seed") {
      throw ParseError(reader.line_number(), "expected 'seed <value>'");
    }
    const std::string owned(tokens[1]);
    errno = 0;
    char* end = nullptr;
    manifest.seed = std::strtoull(owned.c_str(), &end, 10);
    if (owned.empty() || end != owned.c_str() + owned.size() ||
        errno == ERANGE) {
      throw ParseError(reader.line_number(),
                       "malformed seed '" + owned + "'");
    }
  }
  {
    const auto tokens = split_tokens(reader.next_line("stage line"));
    if (tokens.size() != 2 || tokens[0] != "stage") {
      throw ParseError(reader.line_number(), "expected 'stage <side>'");
    }
    manifest.stage_side = parse_float_token(tokens[1], reader.line_number());
  }

  Vec3<double> rig_center = Vec3<double>::Zero();
  double rig_radius = 0.0;
  double rig_height = 0.0;
  {
    const auto tokens = split_tokens(reader.next_line("rig_center line"));
    if (tokens.size() != 4 || tokens[0] != "rig_center") {
      throw ParseError(reader.line_number(),
                       "expected 'rig_center <x> <y> <z>'");
    }
    rig_center =
        Vec3<double>(parse_float_token(tokens[1], reader.line_number()),
                     parse_float_token(tokens[2], reader.line_number()),
                     parse_float_token(tokens[3], reader.line_number()));
  }
  {
    const auto tokens = split_tokens(reader.next_line("rig_radius line"));
    if (tokens.size() != 2 || tokens[0] != "rig_radius") {
      throw ParseError(reader.line_number(), "expected 'rig_radius <m>'");
    }
    rig_radius = parse_float_token(tokens[1], reader.line_number());
  }
  {
    const auto tokens = split_tokens(reader.next_line("rig_height line"));
    if (tokens.size() != 2 || tokens[0] != "rig_height") {
      throw ParseError(reader.line_number(), "expected 'rig_height <m>'");
    }
    rig_height = parse_float_token(tokens[1], reader.line_number());
  }
  Intrinsics intr;
  {
    const auto tokens = split_tokens(reader.next_line("intrinsics line"));
    if (tokens.size() != 7 || tokens[0] != "intrinsics") {
      throw ParseError(reader.line_number(),
                       "expected 'intrinsics <fx> <fy> <cx> <cy> <w> <h>'");
    }
    intr.fx = parse_float_token(tokens[1], reader.line_number());
    intr.fy = parse_float_token(tokens[2], reader.line_number());
    intr.cx = parse_float_token(tokens[3], reader.line_number());
    intr.cy = parse_float_token(tokens[4], reader.line_number());
    intr.width =
        static_cast<int>(parse_int_token(tokens[5], reader.line_number()));
    intr.height =
        static_cast<int>(parse_int_token(tokens[6], reader.line_number()));
  }
  manifest.rig = build_rig(rig_center, rig_radius, rig_height, intr);

  long asset_count = 0;
  {
    const auto tokens = split_tokens(reader.next_line("assets line"));
    if (tokens.size() != 2 || tokens[0] != "assets") {
      throw ParseError(reader.line_number(), "expected 'assets <count>'");
    }
    asset_count = parse_int_token(tokens[1], reader.line_number());
    if (asset_count < 1) {
      throw ValidationError("manifest must declare at least one asset");
    }
  }
  std::set<std::string> asset_ids;
  for (long i = 0; i < asset_count; ++i) {
    const std::string_view line = reader.next_line("asset row");
    const auto tokens = split_tokens(line);
    if (tokens.size() < 4 || tokens[0] != "asset") {
      throw ParseError(reader.line_number(),
                       "expected 'asset <id> <kind> <prompt>'");
    }
    AssetRecord asset;
    asset.asset_id = std::string(tokens[1]);
    asset.kind = kind_from_token(tokens[2], reader.line_number());
    // tokens are views into `line`; the prompt is everything from the
    // fourth token onward, spaces included.
    const std::size_t prompt_pos =
        static_cast<std::size_t>(tokens[3].data() - line.data());
    asset.prompt = std::string(line.substr(prompt_pos));
    if (asset.prompt.empty()) {
      throw ParseError(reader.line_number(), "asset prompt must be non-empty");
    }
    if (!asset_ids.insert(asset.asset_id).second) {
      throw ValidationError("duplicate asset id '" + asset.asset_id + "'");
    }
    manifest.assets.push_back(std::move(asset));
  }

  long comp_count = 0;
  {
    const auto tokens = split_tokens(reader.next_line("compositions line"));
    if (tokens.size() != 2 || tokens[0] != "compositions") {
      throw ParseError(reader.line_number(),
                       "expected 'compositions <count>'");
    }
    comp_count = parse_int_token(tokens[1], reader.line_number());
    if (comp_count < 0) {
      throw ParseError(reader.line_number(),
                       "composition count must be non-negative");
    }
  }
  std::set<std::string> comp_ids;
  for (long i = 0; i < comp_count; ++i) {
    const auto tokens = split_tokens(reader.next_line("composition row"));
    if (tokens.size() != 6 || tokens[0] != "composition") {
      throw ParseError(
          reader.line_number(),
          "expected 'composition <id> <location> <frames> <fps> <entities>'");
    }
    ManifestComposition comp;
    comp.comp_id = std::string(tokens[1]);
    comp.location_tag = std::string(tokens[2]);
    comp.frames =
        static_cast<int>(parse_int_token(tokens[3], reader.line_number()));
    comp.fps = parse_float_token(tokens[4], reader.line_number());
    const long entity_count = parse_int_token(tokens[5], reader.line_number());
    if (comp.frames < 1) {
      throw ValidationError("composition '" + comp.comp_id +
                            "' must have at least one frame");
    }
    if (!(comp.fps > 0.0)) {
      throw ValidationError("composition '" + comp.comp_id +
                            "' must have positive fps");
    }
    if (entity_count < static_cast<long>(kMinEntities) ||
        entity_count > static_cast<long>(kMaxEntities)) {
      throw ValidationError("composition '" + comp.comp_id +
                            "' must contain between 1 and 3 entities, got " +
                            std::to_string(entity_count));
    }
    if (!comp_ids.insert(comp.comp_id).second) {
      throw ValidationError("duplicate composition id '" + comp.comp_id +
                            "'");
    }
    for (long e = 0; e < entity_count; ++e) {
      const auto entity_tokens =
          split_tokens(reader.next_line("entity row of composition '" +
                                        comp.comp_id + "'"));
      if (entity_tokens.size() != 7 || entity_tokens[0] != "entity") {
        throw ParseError(reader.line_number(),
                         "expected 'entity <asset> <template> <scale> <yaw> "
                         "<dx> <dy>'");
      }
      ManifestEntity entity;
      entity.asset_id = std::string(entity_tokens[1]);
      entity.template_id = std::string(entity_tokens[2]);
      entity.scale_factor =
          parse_float_token(entity_tokens[3], reader.line_number());
      entity.yaw_rad =
          parse_float_token(entity_tokens[4], reader.line_number());
      entity.dx = parse_float_token(entity_tokens[5], reader.line_number());
      entity.dy = parse_float_token(entity_tokens[6], reader.line_number());
      if (asset_ids.count(entity.asset_id) == 0) {
        throw ValidationError("composition '" + comp.comp_id +
                              "' references unknown asset '" +
                              entity.asset_id + "'");
      }
      if (!(entity.scale_factor > 0.0)) {
        throw ValidationError("composition '" + comp.comp_id +
                              "' has a non-positive entity scale");
      }
      comp.entities.push_back(std::move(entity));
    }
    manifest.compositions.push_back(std::move(comp));
  }

  long clip_count = 0;
  {
    const auto tokens = split_tokens(reader.next_line("clips line"));
    if (tokens.size() != 2 || tokens[0] != "clips") {
      throw ParseError(reader.line_number(), "expected 'clips <count>'");
    }
    clip_count = parse_int_token(tokens[1], reader.line_number());
    if (clip_count < 0) {
      throw ParseError(reader.line_number(),
                       "clip count must be non-negative");
    }
  }
  std::set<std::string> clip_ids;
  for (long i = 0; i < clip_count; ++i) {
    const auto tokens = split_tokens(reader.next_line("clip row"));
    if (tokens.size() != 4 || tokens[0] != "clip") {
      throw ParseError(reader.line_number(),
                       "expected 'clip <id> <composition> <camera>'");
    }
    ClipRecord clip;
    clip.clip_id = std::string(tokens[1]);
    clip.comp_id = std::string(tokens[2]);
    clip.camera_index =
        static_cast<int>(parse_int_token(tokens[3], reader.line_number()));
    if (comp_ids.count(clip.comp_id) == 0) {
      throw ValidationError("clip '" + clip.clip_id +
                            "' references unknown composition '" +
                            clip.comp_id + "'");
    }
    if (clip.camera_index < 0 || clip.camera_index >= kRigCameraCount) {
      throw ValidationError("clip '" + clip.clip_id +
                            "' camera index out of range");
    }
    if (!clip_ids.insert(clip.clip_id).second) {
      throw ValidationError("duplicate clip id '" + clip.clip_id + "'");
    }
    manifest.clips.push_back(std::move(clip));
  }

  if (!reader.at_end()) {
    throw ParseError(reader.line_number() + 1,
                     "unexpected trailing content after last clip");
  }
  return manifest;
}

}  // namespace trajkit
