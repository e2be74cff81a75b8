// App bootstrap: tab routing, API health probe with a degraded-mode
// banner, and view initialization. The API base URL can be overridden via
// window.CALIBDESIGN_API_BASE (defaults to same origin).

import { ApiClient } from "./api.js";
import {
  createApp,
  registerApp,
  renderBudgetView,
  renderDesignView,
  renderPilotView,
  renderSensitivityView,
} from "./views.js";

const TABS = ["design", "budget", "sensitivity", "pilot"] as const;

function switchTab(name: (typeof TABS)[number]): void {
  for (const tab of TABS) {
    document.getElementById(`view-${tab}`)!.hidden = tab !== name;
    document.getElementById(`tab-${tab}`)!.classList.toggle("active", tab === name);
  }
}

async function boot(): Promise<void> {
  // API origin: ?api=... query parameter, else a global set before this
  // module loads, else same origin
  const fromQuery = new URLSearchParams(window.location.search).get("api");
  const base = fromQuery ??
    (window as unknown as { CALIBDESIGN_API_BASE?: string }).CALIBDESIGN_API_BASE ?? "";
  const client = new ApiClient(base);
  const app = createApp(document.body, client);
  registerApp(app);

  renderDesignView(app);
  renderBudgetView(app);
  renderSensitivityView(app);
  renderPilotView(app);

  for (const tab of TABS) {
    document.getElementById(`tab-${tab}`)!.addEventListener("click", () => switchTab(tab));
  }
  switchTab("design");

  const banner = document.getElementById("health-banner")!;
  try {
    const health = await client.health();
    banner.hidden = true;
    document.getElementById("version")!.textContent = `server ${health.version}`;
  } catch {
    banner.hidden = false;
    banner.textContent =
      "API unreachable — read-only mode; forms will not compute until the " +
      "service is available (start it with: calibdesign serve)";
  }
}

void boot();
