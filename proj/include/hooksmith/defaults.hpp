// Copyright 2026 The hooksmith Authors. All Rights Reserved.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.
//
// Built-in lexicon, operation table and layer-1 map. data/ ships the same
// three tables as JSON; a test keeps them in sync.

#pragma once

#include <map>
#include <string>
#include <vector>

#include "hooksmith/callgraph.hpp"
#include "hooksmith/classifier.hpp"
#include "json.hpp"

namespace hooksmith {

inline FeatureLexicon default_lexicon() {
  std::vector<LexiconEntry> e;
  const auto add = [&](FeatureCategory c, Matcher m, std::initializer_list<const char*> patterns) {
    for (const char* p : patterns) e.push_back({c, m, p});
  };
  using C = FeatureCategory;
  using M = Matcher;
  add(C::class_name, M::contains,
      {"location", "gps", "machine", "camera", "audio", "sound", "wifi", "bluetooth", "sensor", "media"});
  add(C::method_name, M::contains,
      {"location", "gps", "camera", "picture", "preview", "audio", "record", "mic", "wifi", "scan", "bluetooth",
       "discovery", "sensor", "event", "position", "frame"});
  add(C::method_name, M::starts_with, {"start", "callback", "get", "set", "on", "report", "handle", "enable"});
  add(C::param_name, M::contains,
      {"buffer", "event", "sensors_event_t", "listener", "callback", "request", "location", "provider", "data", "user"});
  add(C::return_type, M::equals, {"void"});
  add(C::return_type, M::contains, {"location", "event"});
  add(C::return_type, M::equals, {"boolean"});
  return FeatureLexicon(std::move(e));
}

inline OalTable default_oal() {
  using K = KeywordKind;
  constexpr auto sds = K::sds_type;
  constexpr auto ipc = K::ipc_interface;
  constexpr auto hw = K::hw_interface;
  constexpr auto cmd = K::command_const;
  std::map<std::string, AbstractOperation> ops{
      {"start_GPS", {"gps", {{hw, "native_start"}, {cmd, "GPS_START"}, {ipc, "requestLocationUpdates"}}}},
      {"stop_GPS", {"gps", {{hw, "native_stop"}, {cmd, "GPS_STOP"}, {ipc, "removeUpdates"}}}},
      {"return_GPS", {"gps", {{sds, "Location"}, {ipc, "ILocationManager"}, {ipc, "callLocationChangedLocked"}}}},
      {"report_GPS", {"gps", {{hw, "reportLocation"}, {sds, "GpsLocation"}}}},
      {"start_CAMERA", {"camera", {{hw, "startPreview"}, {cmd, "CAMERA_CMD_START"}, {ipc, "ICamera"}}}},
      {"capture_CAMERA", {"camera", {{hw, "takePicture"}, {hw, "CameraHardwareInterface"}}}},
      {"return_CAMERA", {"camera", {{sds, "CameraFrame"}, {sds, "Picture"}, {ipc, "dataCallback"}}}},
      {"start_MICROPHONE", {"microphone", {{hw, "openInputStream"}, {cmd, "AUDIO_SOURCE_MIC"}}}},
      {"read_MICROPHONE", {"microphone", {{hw, "readPcm"}, {sds, "AudioBuffer"}}}},
      {"return_MICROPHONE", {"microphone", {{ipc, "IAudioRecord"}, {sds, "AudioRecordData"}}}},
      {"scan_WIFI", {"wifi", {{cmd, "SCAN"}, {hw, "wifiCommand"}, {ipc, "startScan"}}}},
      {"return_WIFI", {"wifi", {{sds, "ScanResult"}, {ipc, "getScanResults"}}}},
      {"connect_WIFI", {"wifi", {{cmd, "CONNECT"}, {ipc, "connectNetwork"}}}},
      {"discover_BLUETOOTH", {"bluetooth", {{ipc, "IBluetooth"}, {hw, "startDiscoveryNative"}, {cmd, "BT_DISCOVERY"}}}},
      {"return_BLUETOOTH", {"bluetooth", {{sds, "BluetoothDevice"}, {ipc, "onDeviceFound"}}}},
      {"enable_SENSORS", {"onboard_sensors", {{hw, "activate"}, {cmd, "SENSOR_ENABLE"}}}},
      {"poll_SENSORS", {"onboard_sensors", {{hw, "poll"}, {sds, "sensors_event_t"}}}},
      {"return_SENSORS",
       {"onboard_sensors", {{sds, "SensorEvent"}, {ipc, "ISensorEventConnection"}, {ipc, "onSensorChanged"}}}},
  };
  return OalTable(std::move(ops));
}

inline nlohmann::json default_layer1_json() {
  return {
      {"gps_disable", {"start_GPS", "return_GPS", "report_GPS"}},
      {"gps_obfuscate", {"return_GPS"}},
      {"camera_disable", {"start_CAMERA", "capture_CAMERA", "return_CAMERA"}},
      {"camera_obfuscate", {"return_CAMERA"}},
      {"microphone_disable", {"start_MICROPHONE", "read_MICROPHONE", "return_MICROPHONE"}},
      {"microphone_obfuscate", {"return_MICROPHONE"}},
      {"wifi_disable", {"scan_WIFI", "return_WIFI"}},
      {"wifi_obfuscate", {"return_WIFI"}},
      {"bluetooth_disable", {"discover_BLUETOOTH", "return_BLUETOOTH"}},
      {"bluetooth_obfuscate", {"return_BLUETOOTH"}},
      {"onboard_sensors_disable", {"enable_SENSORS", "poll_SENSORS", "return_SENSORS"}},
      {"onboard_sensors_obfuscate", {"return_SENSORS"}},
  };
}

}  // namespace hooksmith
