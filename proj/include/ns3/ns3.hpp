#pragma once

#include "ns3/bench.hpp"
#include "ns3/error.hpp"
#include "ns3/fuzzy.hpp"
#include "ns3/kg.hpp"
#include "ns3/metrics.hpp"
#include "ns3/parallel.hpp"
#include "ns3/pipeline.hpp"
#include "ns3/planner.hpp"
#include "ns3/predictor.hpp"
#include "ns3/query.hpp"
#include "ns3/report.hpp"
#include "ns3/scores.hpp"
#include "ns3/search.hpp"
#include "ns3/templates.hpp"
