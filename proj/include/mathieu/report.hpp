#pragma once

#include <string>

#include "json.hpp"
#include "mathieu/asymptotics.hpp"
#include "mathieu/discriminant.hpp"
#include "mathieu/expansion.hpp"
#include "mathieu/floquet.hpp"
#include "mathieu/spectrality.hpp"

namespace mh {

using Json = nlohmann::ordered_json;

constexpr const char* kSchemaVersion = "1.0";

Json to_json(cplx z);
Json to_json(const DiophantineProbe& p);
Json to_json(const DiophantineVerdict& v);
Json to_json(const CriticalPoint& cp);
Json to_json(const InverseDnIntegral& v);
Json to_json(const EssEvidence& e);
Json to_json(const ProjectionProfile& p);
Json to_json(const RegionDecomposition& r);
Json to_json(const SpectralityReport& r);
Json to_json(const ResidualReport& r);
Json to_json(const PredictedDegeneracy& p);

// top-level artifact: {"schema_version", "kind", ...payload}
Json artifact(const std::string& kind, const MathieuPotential& pot, Json payload);
std::string dump(const Json& j);

// t,n,re,im,residual rows for every tracked curve
std::string spectrum_csv(const BlochCurveSet& curves);
std::string profile_csv(const ProjectionProfile& p);

}  // namespace mh
