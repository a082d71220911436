/** Browser entry point: wires the session store to the DOM. */

import { ApiClient } from "./api.js";
import { renderSession } from "./render.js";
import { SessionStore } from "./session.js";

const SERVICE_URL =
  new URLSearchParams(location.search).get("service") ??
  "http://localhost:8000";

async function boot(): Promise<void> {
  const root = document.getElementById("app");
  if (!root) return;
  const api = new ApiClient(SERVICE_URL);
  const store = new SessionStore(api);

  const redraw = () => {
    root.innerHTML = renderSession(store.view());
  };

  const picker = document.getElementById("task-picker") as HTMLSelectElement;
  const refreshPicker = async () => {
    const tasks = await api.listTasks();
    picker.innerHTML = tasks
      .map(
        (task) =>
          `<option value="${task.task_id}">` +
          `[${task.category}] ${task.instruction}</option>`,
      )
      .join("");
  };
  await refreshPicker();

  document.getElementById("start")?.addEventListener("click", async () => {
    const worldGraph = (
      document.getElementById("world-graph") as HTMLInputElement
    ).checked;
    await store.start(picker.value, { worldGraph });
    if (store.view().error?.includes("404")) await refreshPicker();
    redraw();
  });

  document.getElementById("export")?.addEventListener("click", async () => {
    const blob = new Blob([await store.exportSession()], {
      type: "application/jsonl",
    });
    const anchor = document.createElement("a");
    anchor.href = URL.createObjectURL(blob);
    anchor.download = `${store.view().episodeId}.jsonl`;
    anchor.click();
  });

  root.addEventListener("click", async (event) => {
    const target = event.target as HTMLElement;
    if (target.dataset.command) {
      await store.submit(target.dataset.command);
      redraw();
    } else if (target.dataset.agent) {
      store.switchAgent(target.dataset.agent);
      redraw();
    } else if (target.dataset.room) {
      await store.submit(`GOTO ${target.dataset.room}`);
      redraw();
    }
  });

  root.addEventListener("submit", async (event) => {
    event.preventDefault();
    const input = (event.target as HTMLFormElement).elements.namedItem(
      "raw",
    ) as HTMLInputElement;
    if (input.value.trim()) {
      await store.submit(input.value.trim());
      input.value = "";
      redraw();
    }
  });

  redraw();
}

void boot();
