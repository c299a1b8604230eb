#pragma once

// Umbrella header for the VR streaming traffic toolkit.

#include "vrtraffic/distributions.hpp"
#include "vrtraffic/errors.hpp"
#include "vrtraffic/fit.hpp"
#include "vrtraffic/flow_classify.hpp"
#include "vrtraffic/frame_ident.hpp"
#include "vrtraffic/link_sim.hpp"
#include "vrtraffic/metrics.hpp"
#include "vrtraffic/packet.hpp"
#include "vrtraffic/report.hpp"
#include "vrtraffic/trace_io.hpp"
#include "vrtraffic/traffic_gen.hpp"
