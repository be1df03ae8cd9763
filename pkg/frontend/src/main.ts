import { ScholarQAClient, apiBase } from "./api.js";
import { renderAnnotateView, renderAskView } from "./views.js";

function route(): void {
  const root = document.getElementById("app");
  if (!root) return;
  const client = new ScholarQAClient(apiBase());
  if (window.location.hash === "#/annotate") {
    void renderAnnotateView(root, client);
  } else {
    renderAskView(root, client);
  }
  document.querySelectorAll<HTMLAnchorElement>("nav a").forEach((a) => {
    a.classList.toggle("active", a.hash === (window.location.hash || "#/ask"));
  });
}

window.addEventListener("hashchange", route);
window.addEventListener("DOMContentLoaded", route);
